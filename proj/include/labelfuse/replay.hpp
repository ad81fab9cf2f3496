#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace labelfuse {

// Recorded-annotator log ingestion. Format: a required header line `#l=<int>`
// declaring the per-teacher budget, an optional `#n=<int>` declaring the
// instance count, then one label per line as `teacher<TAB>instance<TAB>name`.
// Lines from different teachers may interleave; other `#` lines are comments.
// Names are private per teacher: equal names from one teacher assert equal
// classes, distinct names assert distinct classes, and nothing relates names
// across teachers.

// The log is syntactically unusable: malformed line, missing header, or a
// teacher exceeding the declared budget.
struct ReplayFormatError : std::runtime_error {
    uint64_t line;  // 1-based; 0 when not tied to a line
    ReplayFormatError(std::string msg, uint64_t line_);
};

// The log contradicts itself: some teacher's names imply two instances are
// both equivalent and different.
struct ReplayInconsistency : std::runtime_error {
    uint64_t teacher;
    uint64_t a, b;          // the clashing instances
    uint64_t lineA, lineB;  // where each entered that teacher's view
    ReplayInconsistency(uint64_t teacher_, uint64_t a_, uint64_t b_, uint64_t lineA_,
                        uint64_t lineB_);
};

struct ReplayResult {
    uint64_t n = 0;         // max(declared n, highest instance id + 1)
    uint64_t labels = 0;    // log lines consumed
    uint64_t teachers = 0;  // distinct teacher ids
    std::vector<std::vector<uint64_t>> components;
};

// Builds the contraction graph implied by the log, processing lines in file
// order, and reports the surviving components. Throws ReplayFormatError or
// ReplayInconsistency as above.
ReplayResult replay_log(std::istream& in, std::optional<uint64_t> declaredN = std::nullopt);

}  // namespace labelfuse
