#pragma once

#include <string>
#include <vector>

namespace hat::expand {

enum class SelectionKind { kHat, kRandom, kAccuracyOnly, kAll };
enum class FusionKind { kHatMixer, kEqual, kNearest, kWeighted };
enum class InjectionKind { kHatAdaptive, kFixedAlpha, kNone };

struct StrategySpec {
    std::string name = "hat";
    SelectionKind selection = SelectionKind::kHat;
    FusionKind fusion = FusionKind::kHatMixer;
    InjectionKind injection = InjectionKind::kHatAdaptive;
    double fixed_alpha = 1.0;
};

// Named presets: hat, supervised, random, accuracy_only, all, equal,
// nearest, weighted.
StrategySpec strategy_by_name(const std::string& name);
std::vector<std::string> known_strategies();

std::string to_string(SelectionKind k);
std::string to_string(FusionKind k);
std::string to_string(InjectionKind k);

}  // namespace hat::expand
