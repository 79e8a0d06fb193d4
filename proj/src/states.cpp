#include "ehm/states.hpp"

namespace ehm {

std::optional<TransitionKind> classify_transition(State from, State to) {
  for (TransitionKind k : kAllTransitions) {
    if (transition_from(k) == from && transition_to(k) == to) return k;
  }
  return std::nullopt;
}

std::string_view state_code(State s) {
  switch (s) {
    case State::Healthy: return "H";
    case State::Stroke: return "S1";
    case State::Dementia: return "D";
    case State::Dead: return "d";
  }
  return "?";
}

std::optional<State> parse_state(std::string_view code) {
  if (code == "H") return State::Healthy;
  if (code == "S1") return State::Stroke;
  if (code == "D") return State::Dementia;
  if (code == "d") return State::Dead;
  return std::nullopt;
}

std::string_view transition_code(TransitionKind k) {
  switch (k) {
    case TransitionKind::HealthyToStroke: return "H-S1";
    case TransitionKind::HealthyToDementia: return "H-D";
    case TransitionKind::HealthyToDead: return "H-d";
    case TransitionKind::StrokeToDementia: return "S1-D";
    case TransitionKind::StrokeToDead: return "S1-d";
    case TransitionKind::DementiaToDead: return "D-d";
  }
  return "?";
}

std::optional<TransitionKind> parse_transition(std::string_view code) {
  for (TransitionKind k : kAllTransitions) {
    if (transition_code(k) == code) return k;
  }
  return std::nullopt;
}

}  // namespace ehm
