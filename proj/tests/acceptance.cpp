#include "gnat/acceptance.hpp"
#include "gnat/numeric.hpp"

#include <iostream>

int main() {
    gnat::AcceptanceOptions opts;
    opts.threads = gnat::numeric::default_threads();
    const gnat::AcceptanceReport rep = gnat::run_acceptance(opts);
    for (const auto& line : rep.lines()) std::cout << line << "\n";
    return rep.pass() ? 0 : 1;
}
