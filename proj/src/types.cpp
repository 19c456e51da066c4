#include "greeks/vibrato/types.hpp"

namespace greeks::vibrato {

const char* to_string(Antithetic a) {
  switch (a) {
    case Antithetic::Off: return "off";
    case Antithetic::TwoPoint: return "two_point";
    case Antithetic::ThreePoint: return "three_point";
  }
  return "?";
}

const char* to_string(LastStepMode m) {
  return m == LastStepMode::Pathwise ? "pathwise" : "likelihood_ratio";
}

}  // namespace greeks::vibrato
