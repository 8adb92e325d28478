#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqlrl {

// Delimiter-separated metric files, one header row each:
//   training: agent_id,episode,steps,return,distinct_states  (one file per agent)
//   test:     agent_id,episode,steps                          (one pooled file per cohort)
// Episodes are numbered from 1 in file order.

struct TrainRow {
    int agent_id = 0;
    long episode = 0;
    int steps = 0;
    double ret = 0.0;  // discounted return G
    long long distinct_states = 0;
};

struct TestRow {
    int agent_id = 0;
    long episode = 0;
    int steps = 0;
};

void write_train_csv(const std::string& path, int agent_id, const std::vector<std::int32_t>& steps,
                     const std::vector<double>& returns,
                     const std::vector<std::int64_t>& distinct_states);

void write_test_csv(const std::string& path, const std::vector<std::vector<int>>& per_agent_steps);

// Strict readers: a wrong header or malformed field raises std::runtime_error
// naming the file, line, and offending column.
std::vector<TrainRow> read_train_csv(const std::string& path);
std::vector<TestRow> read_test_csv(const std::string& path);

// FNV-1a over a file's bytes; the determinism checks compare these across
// re-runs. Throws std::runtime_error if the file cannot be read.
std::uint64_t fnv1a_file(const std::string& path);

}  // namespace sqlrl
