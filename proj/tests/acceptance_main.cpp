#include <iostream>

#include "fx/acceptance.hpp"

int main() {
    int failed = 0;
    fx::acceptance::runAll([&](const fx::acceptance::Outcome& o) {
        std::cout << fx::acceptance::formatLine(o) << std::endl;
        failed += !o.passed;
    });
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
