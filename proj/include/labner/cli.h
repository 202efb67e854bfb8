#ifndef LABNER_CLI_H_
#define LABNER_CLI_H_

#include <ostream>

namespace labner {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `labner` command. Data goes to `out` unless an --out
// path is given; logs, warnings and errors go to `err`. Output files are
// written only after the command succeeded.
int Run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err);

}  // namespace labner

#endif  // LABNER_CLI_H_
