#include "sqlrl/harness/metrics_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqlrl {

namespace {

constexpr const char* kTrainHeader = "agent_id,episode,steps,return,distinct_states";
constexpr const char* kTestHeader = "agent_id,episode,steps";

[[noreturn]] void fail(const std::string& path, long line, const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw std::runtime_error(msg.str());
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string::npos) {
            out.push_back(line.substr(begin));
            return out;
        }
        out.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

long long parse_integer(const std::string& field, const std::string& path, long line,
                        const char* column) {
    errno = 0;
    char* end = nullptr;
    const long long value = std::strtoll(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
        fail(path, line, std::string("column '") + column + "': not an integer: '" + field + "'");
    }
    return value;
}

double parse_real(const std::string& field, const std::string& path, long line,
                  const char* column) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
        fail(path, line, std::string("column '") + column + "': not a number: '" + field + "'");
    }
    return value;
}

std::ifstream open_with_header(const std::string& path, const char* header) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string first;
    if (!std::getline(is, first)) fail(path, 1, "empty file (expected header)");
    if (first != header) {
        fail(path, 1, std::string("bad header: expected '") + header + "', got '" + first + "'");
    }
    return is;
}

}  // namespace

void write_train_csv(const std::string& path, int agent_id, const std::vector<std::int32_t>& steps,
                     const std::vector<double>& returns,
                     const std::vector<std::int64_t>& distinct_states) {
    if (steps.size() != returns.size() || steps.size() != distinct_states.size()) {
        throw std::invalid_argument("metric series lengths differ");
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << kTrainHeader << '\n';
    char buf[128];
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%d,%.10g,%lld\n", agent_id, i + 1, steps[i],
                      returns[i], static_cast<long long>(distinct_states[i]));
        os << buf;
    }
    if (!os) throw std::runtime_error("short write to " + path);
}

void write_test_csv(const std::string& path, const std::vector<std::vector<int>>& per_agent_steps) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << kTestHeader << '\n';
    for (std::size_t agent = 0; agent < per_agent_steps.size(); ++agent) {
        const auto& steps = per_agent_steps[agent];
        for (std::size_t i = 0; i < steps.size(); ++i) {
            os << agent << ',' << (i + 1) << ',' << steps[i] << '\n';
        }
    }
    if (!os) throw std::runtime_error("short write to " + path);
}

std::vector<TrainRow> read_train_csv(const std::string& path) {
    std::ifstream is = open_with_header(path, kTrainHeader);
    std::vector<TrainRow> rows;
    std::string line;
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 5) fail(path, line_no, "expected 5 columns");
        TrainRow row;
        row.agent_id = static_cast<int>(parse_integer(fields[0], path, line_no, "agent_id"));
        row.episode = static_cast<long>(parse_integer(fields[1], path, line_no, "episode"));
        row.steps = static_cast<int>(parse_integer(fields[2], path, line_no, "steps"));
        row.ret = parse_real(fields[3], path, line_no, "return");
        row.distinct_states = parse_integer(fields[4], path, line_no, "distinct_states");
        rows.push_back(row);
    }
    return rows;
}

std::vector<TestRow> read_test_csv(const std::string& path) {
    std::ifstream is = open_with_header(path, kTestHeader);
    std::vector<TestRow> rows;
    std::string line;
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3) fail(path, line_no, "expected 3 columns");
        TestRow row;
        row.agent_id = static_cast<int>(parse_integer(fields[0], path, line_no, "agent_id"));
        row.episode = static_cast<long>(parse_integer(fields[1], path, line_no, "episode"));
        row.steps = static_cast<int>(parse_integer(fields[2], path, line_no, "steps"));
        rows.push_back(row);
    }
    return rows;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
        if (!is) break;
    }
    return hash;
}

}  // namespace sqlrl
