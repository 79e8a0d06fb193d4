#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ehm {

// Disease states in increasing severity. Dead is absorbing.
enum class State : std::uint8_t { Healthy = 0, Stroke = 1, Dementia = 2, Dead = 3 };

inline constexpr int kNumStates = 4;
inline constexpr int kNumTransient = 3;  // Healthy, Stroke, Dementia
inline constexpr int kNumTransitions = 6;

// The six admissible transitions of the illness-death model.
enum class TransitionKind : std::uint8_t {
  HealthyToStroke = 0,
  HealthyToDementia = 1,
  HealthyToDead = 2,
  StrokeToDementia = 3,
  StrokeToDead = 4,
  DementiaToDead = 5,
};

inline constexpr std::array<TransitionKind, kNumTransitions> kAllTransitions{
    TransitionKind::HealthyToStroke,  TransitionKind::HealthyToDementia,
    TransitionKind::HealthyToDead,    TransitionKind::StrokeToDementia,
    TransitionKind::StrokeToDead,     TransitionKind::DementiaToDead,
};

constexpr int index_of(TransitionKind k) { return static_cast<int>(k); }
constexpr int index_of(State s) { return static_cast<int>(s); }

constexpr State transition_from(TransitionKind k) {
  constexpr std::array<State, kNumTransitions> from{
      State::Healthy, State::Healthy, State::Healthy,
      State::Stroke,  State::Stroke,  State::Dementia};
  return from[index_of(k)];
}

constexpr State transition_to(TransitionKind k) {
  constexpr std::array<State, kNumTransitions> to{
      State::Stroke, State::Dementia, State::Dead,
      State::Dementia, State::Dead,   State::Dead};
  return to[index_of(k)];
}

// Admissible (from, to) pairs only; anything else (recovery, D->S1, self
// loops, moves out of Dead) yields nullopt.
std::optional<TransitionKind> classify_transition(State from, State to);

std::string_view state_code(State s);  // "H", "S1", "D", "d"
std::optional<State> parse_state(std::string_view code);

std::string_view transition_code(TransitionKind k);  // "H-S1", ...
std::optional<TransitionKind> parse_transition(std::string_view code);

}  // namespace ehm
