#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace agelab::verify {

// Fast invariant/oracle checks behind the `verify` subcommand. A check
// throws (std::exception) to fail; the message becomes the FAIL detail.
struct Check {
  std::string name;
  std::function<void()> run;
};

const std::vector<Check>& all_checks();

// Prints one PASS/FAIL line per check plus a summary; returns the number of
// failures.
int run_all(std::ostream& out);

}  // namespace agelab::verify
