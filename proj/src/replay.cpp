#include "labelfuse/replay.hpp"

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "labelfuse/graph.hpp"

namespace labelfuse {

ReplayFormatError::ReplayFormatError(std::string msg, uint64_t line_)
    : std::runtime_error(line_ ? "line " + std::to_string(line_) + ": " + msg : msg),
      line(line_) {}

ReplayInconsistency::ReplayInconsistency(uint64_t teacher_, uint64_t a_, uint64_t b_,
                                         uint64_t lineA_, uint64_t lineB_)
    : std::runtime_error("teacher " + std::to_string(teacher_) + " contradicts itself on instances " +
                         std::to_string(a_) + " and " + std::to_string(b_) + " (lines " +
                         std::to_string(lineA_) + " and " + std::to_string(lineB_) + ")"),
      teacher(teacher_),
      a(a_),
      b(b_),
      lineA(lineA_),
      lineB(lineB_) {}

namespace {

struct Record {
    uint64_t teacher;
    uint64_t instance;
    std::string name;
    uint64_t line;
};

bool parse_u64(std::string_view s, uint64_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Per-teacher naming state: one group per name seen so far.
struct Group {
    uint64_t root;
    uint64_t firstInstance;
    uint64_t firstLine;
};

struct TeacherState {
    std::unordered_map<std::string, size_t> byName;
    std::vector<Group> groups;
    uint64_t labels = 0;
};

}  // namespace

ReplayResult replay_log(std::istream& in, std::optional<uint64_t> declaredN) {
    std::vector<Record> records;
    std::optional<uint64_t> budget;
    std::optional<uint64_t> headerN;
    uint64_t maxId = 0;
    bool anyInstance = false;

    std::string raw;
    uint64_t lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        std::string_view line(raw);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.rfind("#l=", 0) == 0) {
                if (budget) throw ReplayFormatError("duplicate budget header", lineNo);
                if (!records.empty())
                    throw ReplayFormatError("budget header must precede label lines", lineNo);
                uint64_t v;
                if (!parse_u64(line.substr(3), v) || v == 0)
                    throw ReplayFormatError("budget header needs a positive integer", lineNo);
                budget = v;
            } else if (line.rfind("#n=", 0) == 0) {
                if (headerN) throw ReplayFormatError("duplicate instance-count header", lineNo);
                uint64_t v;
                if (!parse_u64(line.substr(3), v))
                    throw ReplayFormatError("instance-count header needs an integer", lineNo);
                headerN = v;
            }
            continue;  // other # lines are comments
        }
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
            throw ReplayFormatError("expected teacher<TAB>instance<TAB>name", lineNo);
        Record rec;
        rec.line = lineNo;
        if (!parse_u64(line.substr(0, t1), rec.teacher))
            throw ReplayFormatError("bad teacher id", lineNo);
        if (!parse_u64(line.substr(t1 + 1, t2 - t1 - 1), rec.instance))
            throw ReplayFormatError("bad instance id", lineNo);
        if (rec.instance >= UINT32_MAX)
            throw ReplayFormatError("instance id too large", lineNo);
        std::string_view name = line.substr(t2 + 1);
        if (name.empty()) throw ReplayFormatError("empty name", lineNo);
        rec.name.assign(name);
        if (!budget) throw ReplayFormatError("missing #l=<int> budget header", lineNo);
        maxId = std::max(maxId, rec.instance);
        anyInstance = true;
        records.push_back(std::move(rec));
    }
    if (in.bad()) throw ReplayFormatError("read failure", 0);

    ReplayResult res;
    res.n = declaredN ? *declaredN : headerN.value_or(0);
    if (anyInstance) {
        if (res.n && maxId >= res.n)
            throw ReplayFormatError("instance id " + std::to_string(maxId) +
                                        " outside declared instance count " + std::to_string(res.n),
                                    0);
        res.n = std::max(res.n, maxId + 1);
    }
    res.labels = records.size();

    std::unordered_map<uint64_t, TeacherState> states;
    for (const auto& rec : records) {
        auto& ts = states[rec.teacher];
        if (++ts.labels > *budget)
            throw ReplayFormatError("teacher " + std::to_string(rec.teacher) +
                                        " exceeds the budget of " + std::to_string(*budget),
                                    rec.line);
    }
    res.teachers = states.size();
    for (auto& [id, ts] : states) ts.labels = 0;

    if (res.n == 0) return res;  // header-only log, nothing to partition

    ContractionGraph graph(res.n);
    for (const auto& rec : records) {
        auto& ts = states[rec.teacher];
        auto it = ts.byName.find(rec.name);
        if (it != ts.byName.end()) {
            Group& grp = ts.groups[it->second];
            uint64_t ri = graph.find(rec.instance);
            uint64_t rg = graph.find(grp.root);
            if (ri != rg) {
                if (graph.separated(ri, rg))
                    throw ReplayInconsistency(rec.teacher, grp.firstInstance, rec.instance,
                                              grp.firstLine, rec.line);
                grp.root = graph.contract(ri, rg);
            }
        } else {
            uint64_t ri = graph.find(rec.instance);
            for (const Group& other : ts.groups) {
                uint64_t rg = graph.find(other.root);
                if (rg == ri)
                    throw ReplayInconsistency(rec.teacher, other.firstInstance, rec.instance,
                                              other.firstLine, rec.line);
                if (!graph.separated(ri, rg)) graph.separate(rec.instance, other.root);
            }
            ts.byName.emplace(rec.name, ts.groups.size());
            ts.groups.push_back({ri, rec.instance, rec.line});
        }
    }
    res.components = graph.components();
    return res;
}

}  // namespace labelfuse
