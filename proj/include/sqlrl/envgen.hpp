#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqlrl/actionspace.hpp"
#include "sqlrl/rng.hpp"

namespace sqlrl {

enum class ColumnType { Integer, Varchar, Datetime };

struct TableSchema {
    std::string name;  // Table<i>, or Flagtable
    std::vector<std::string> column_names;
    std::vector<ColumnType> column_types;
    std::vector<std::vector<std::string>> rows;  // row-major, one value per column
};

struct DatabaseSchema {
    std::vector<TableSchema> tables;
    TableSchema flag_table;  // single varchar column "flag", single row ("flag")
};

enum class ConditionKind { Equals, Greater, BetweenDatePrefix };

struct QueryTemplate {
    std::vector<std::string> selected_columns;
    std::string table_name;
    std::string where_column;
    ConditionKind condition = ConditionKind::Equals;
    EscapeKind input_form = EscapeKind::NoEscape;  // raw s, "s", or 's'
    int column_count = 1;                          // = selected_columns.size(), in [1,5]
};

struct EnvInstance {
    DatabaseSchema database;
    QueryTemplate query;
    std::uint64_t seed = 0;
};

// One random value for a column of type t. Integer in [0,999]; varchar of
// 1..10 lowercase alphanumerics, never the literal "flag"; datetime in
// MM/DD/YYYY hh:mm:ss AM/PM form.
std::string generate_value(ColumnType t, Rng& rng);

// Fully deterministic in seed: same seed, same instance, byte for byte.
EnvInstance generate_instance(std::uint64_t seed);

// Renders the vulnerable server-side query with a single {INPUT} placeholder,
// quoted according to input_form, e.g.
//   SELECT Column3,Column4 FROM Table2 WHERE Column1 = '{INPUT}'
std::string render_template(const QueryTemplate& t);

inline constexpr char kInputPlaceholder[] = "{INPUT}";
inline constexpr char kBetweenDateLiteral[] = "'01/01/2000 12:00:00 AM'";

const char* to_string(ColumnType t);
const char* to_string(ConditionKind c);

// Structured-text (JSON) round trip, used for golden fixtures and `gen`.
std::string instance_to_json(const EnvInstance& inst);
EnvInstance instance_from_json(const std::string& text);

}  // namespace sqlrl
