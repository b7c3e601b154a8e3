#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fx::acceptance {

/// Largest constant allowed in the gap criterion: naive/effcount tick ratios must exceed n / kGapConstant.
inline constexpr double kGapConstant = 32;

struct Outcome {
    int id;
    std::string title;
    bool passed;
    std::string detail;
    double seconds;
};

/// Runs every criterion in order, reporting each as it finishes.
std::vector<Outcome> runAll(const std::function<void(const Outcome&)>& onDone = nullptr);

/// One line: `[PASS] 4 the gap (...)  1.23s`.
std::string formatLine(const Outcome& o);

}  // namespace fx::acceptance
