#include "hat/expand/strategy.hpp"

#include "hat/error.hpp"

namespace hat::expand {

StrategySpec strategy_by_name(const std::string& name) {
    StrategySpec s;
    s.name = name;
    if (name == "hat") {
        s.selection = SelectionKind::kHat;
        s.fusion = FusionKind::kHatMixer;
        s.injection = InjectionKind::kHatAdaptive;
    } else if (name == "supervised") {
        s.injection = InjectionKind::kNone;
    } else if (name == "random") {
        s.selection = SelectionKind::kRandom;
        s.fusion = FusionKind::kHatMixer;
        s.injection = InjectionKind::kHatAdaptive;
    } else if (name == "accuracy_only") {
        s.selection = SelectionKind::kAccuracyOnly;
        s.fusion = FusionKind::kHatMixer;
        s.injection = InjectionKind::kHatAdaptive;
    } else if (name == "all") {
        s.selection = SelectionKind::kAll;
        s.fusion = FusionKind::kHatMixer;
        s.injection = InjectionKind::kHatAdaptive;
    } else if (name == "equal") {
        s.selection = SelectionKind::kHat;
        s.fusion = FusionKind::kEqual;
        s.injection = InjectionKind::kFixedAlpha;
    } else if (name == "nearest") {
        s.selection = SelectionKind::kHat;
        s.fusion = FusionKind::kNearest;
        s.injection = InjectionKind::kFixedAlpha;
    } else if (name == "weighted") {
        s.selection = SelectionKind::kHat;
        s.fusion = FusionKind::kWeighted;
        s.injection = InjectionKind::kFixedAlpha;
    } else {
        throw ConfigError("unknown strategy '" + name + "'");
    }
    return s;
}

std::vector<std::string> known_strategies() {
    return {"hat", "supervised", "random", "accuracy_only", "all", "equal", "nearest", "weighted"};
}

std::string to_string(SelectionKind k) {
    switch (k) {
        case SelectionKind::kHat: return "hat";
        case SelectionKind::kRandom: return "random";
        case SelectionKind::kAccuracyOnly: return "accuracy_only";
        case SelectionKind::kAll: return "all";
    }
    return "?";
}

std::string to_string(FusionKind k) {
    switch (k) {
        case FusionKind::kHatMixer: return "hat_mixer";
        case FusionKind::kEqual: return "equal";
        case FusionKind::kNearest: return "nearest";
        case FusionKind::kWeighted: return "weighted";
    }
    return "?";
}

std::string to_string(InjectionKind k) {
    switch (k) {
        case InjectionKind::kHatAdaptive: return "hat_adaptive";
        case InjectionKind::kFixedAlpha: return "fixed_alpha";
        case InjectionKind::kNone: return "none";
    }
    return "?";
}

}  // namespace hat::expand
