#include "sqlrl/envgen.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace sqlrl {

namespace {

const ColumnType kTypeOrder[3] = {ColumnType::Integer, ColumnType::Varchar,
                                  ColumnType::Datetime};
const char kAlnum[] = "abcdefghijklmnopqrstuvwxyz0123456789";

std::string column_name(int j) { return "Column" + std::to_string(j); }

// Draw order inside a table is fixed: column count, per-column types, row
// count, then row values in row-major order.
TableSchema generate_table(int table_index, int min_columns, Rng& rng) {
    TableSchema t;
    t.name = "Table" + std::to_string(table_index);
    int n_cols = rng.uniform_int(1, 5);
    if (n_cols < min_columns) n_cols = min_columns;
    for (int j = 1; j <= n_cols; ++j) {
        t.column_names.push_back(column_name(j));
        t.column_types.push_back(kTypeOrder[rng.uniform_int(0, 2)]);
    }
    const int n_rows = rng.uniform_int(1, 5);
    for (int r = 0; r < n_rows; ++r) {
        std::vector<std::string> row;
        row.reserve(n_cols);
        for (int j = 0; j < n_cols; ++j) {
            row.push_back(generate_value(t.column_types[j], rng));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

std::string generate_value(ColumnType t, Rng& rng) {
    switch (t) {
        case ColumnType::Integer:
            return std::to_string(rng.uniform_int(0, 999));
        case ColumnType::Varchar: {
            std::string s;
            do {
                s.clear();
                const int len = rng.uniform_int(1, 10);
                for (int i = 0; i < len; ++i) {
                    s += kAlnum[rng.uniform_int(0, 35)];
                }
            } while (s == "flag");  // keep flag detection unambiguous
            return s;
        }
        case ColumnType::Datetime: {
            const int month = rng.uniform_int(1, 12);
            const int day = rng.uniform_int(1, 28);
            const int year = rng.uniform_int(1990, 2030);
            const int hour = rng.uniform_int(1, 12);
            const int minute = rng.uniform_int(0, 59);
            const int second = rng.uniform_int(0, 59);
            const bool pm = rng.uniform_int(0, 1) == 1;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%02d/%02d/%04d %02d:%02d:%02d %s", month, day,
                          year, hour, minute, second, pm ? "PM" : "AM");
            return buf;
        }
    }
    throw std::logic_error("bad ColumnType");
}

EnvInstance generate_instance(std::uint64_t seed) {
    Rng rng(splitmix64(seed));
    EnvInstance inst;
    inst.seed = seed;

    // Template difficulty parameters first, so their marginals are exactly
    // uniform and independent of the schema draws.
    QueryTemplate& q = inst.query;
    q.input_form = static_cast<EscapeKind>(rng.uniform_int(0, 2));
    q.column_count = rng.uniform_int(1, 5);

    const int n_tables = rng.uniform_int(1, 5);
    const int target = rng.uniform_int(0, n_tables - 1);
    for (int i = 1; i <= n_tables; ++i) {
        // The target table is generated with at least column_count columns so
        // the template is always satisfiable.
        const int min_cols = (i - 1 == target) ? q.column_count : 1;
        inst.database.tables.push_back(generate_table(i, min_cols, rng));
    }

    TableSchema flag;
    flag.name = "Flagtable";
    flag.column_names = {"flag"};
    flag.column_types = {ColumnType::Varchar};
    flag.rows = {{"flag"}};
    inst.database.flag_table = std::move(flag);

    const TableSchema& tt = inst.database.tables[target];
    q.table_name = tt.name;

    // column_count distinct selected columns, drawn without replacement and
    // listed in ascending column order.
    std::vector<int> idx(tt.column_names.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    for (int k = 0; k < q.column_count; ++k) {
        const int j = k + static_cast<int>(rng.uniform_index(idx.size() - k));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(q.column_count);
    std::sort(idx.begin(), idx.end());
    for (int i : idx) q.selected_columns.push_back(tt.column_names[i]);

    q.where_column = tt.column_names[rng.uniform_index(tt.column_names.size())];
    q.condition = static_cast<ConditionKind>(rng.uniform_int(0, 2));
    return inst;
}

std::string render_template(const QueryTemplate& t) {
    std::string s = "SELECT ";
    for (std::size_t i = 0; i < t.selected_columns.size(); ++i) {
        if (i > 0) s += ",";
        s += t.selected_columns[i];
    }
    s += " FROM " + t.table_name + " WHERE " + t.where_column + " ";
    switch (t.condition) {
        case ConditionKind::Equals: s += "= "; break;
        case ConditionKind::Greater: s += "> "; break;
        case ConditionKind::BetweenDatePrefix:
            s += "BETWEEN " + std::string(kBetweenDateLiteral) + " AND ";
            break;
    }
    switch (t.input_form) {
        case EscapeKind::NoEscape: s += kInputPlaceholder; break;
        case EscapeKind::DoubleQuote: s += "\"" + std::string(kInputPlaceholder) + "\""; break;
        case EscapeKind::SingleQuote: s += "'" + std::string(kInputPlaceholder) + "'"; break;
    }
    return s;
}

const char* to_string(ColumnType t) {
    switch (t) {
        case ColumnType::Integer: return "integer";
        case ColumnType::Varchar: return "varchar";
        case ColumnType::Datetime: return "datetime";
    }
    return "?";
}

const char* to_string(ConditionKind c) {
    switch (c) {
        case ConditionKind::Equals: return "equals";
        case ConditionKind::Greater: return "greater";
        case ConditionKind::BetweenDatePrefix: return "between_date_prefix";
    }
    return "?";
}

namespace {

using nlohmann::json;

ColumnType column_type_from_string(const std::string& s) {
    if (s == "integer") return ColumnType::Integer;
    if (s == "varchar") return ColumnType::Varchar;
    if (s == "datetime") return ColumnType::Datetime;
    throw std::invalid_argument("unknown column type: " + s);
}

json table_to_json(const TableSchema& t) {
    json cols = json::array();
    for (std::size_t i = 0; i < t.column_names.size(); ++i) {
        cols.push_back({{"name", t.column_names[i]}, {"type", to_string(t.column_types[i])}});
    }
    return {{"name", t.name}, {"columns", cols}, {"rows", t.rows}};
}

TableSchema table_from_json(const json& j) {
    TableSchema t;
    t.name = j.at("name").get<std::string>();
    for (const auto& c : j.at("columns")) {
        t.column_names.push_back(c.at("name").get<std::string>());
        t.column_types.push_back(column_type_from_string(c.at("type").get<std::string>()));
    }
    t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
    return t;
}

}  // namespace

std::string instance_to_json(const EnvInstance& inst) {
    json tables = json::array();
    for (const auto& t : inst.database.tables) tables.push_back(table_to_json(t));
    json j = {
        {"seed", inst.seed},
        {"database", {{"tables", tables}, {"flag_table", table_to_json(inst.database.flag_table)}}},
        {"template",
         {{"selected_columns", inst.query.selected_columns},
          {"table", inst.query.table_name},
          {"where_column", inst.query.where_column},
          {"condition", to_string(inst.query.condition)},
          {"input_form", to_string(inst.query.input_form)},
          {"column_count", inst.query.column_count}}},
        {"rendered", render_template(inst.query)},
    };
    return j.dump(2);
}

EnvInstance instance_from_json(const std::string& text) {
    const json j = json::parse(text);
    EnvInstance inst;
    inst.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& t : j.at("database").at("tables")) {
        inst.database.tables.push_back(table_from_json(t));
    }
    inst.database.flag_table = table_from_json(j.at("database").at("flag_table"));
    const json& q = j.at("template");
    inst.query.selected_columns = q.at("selected_columns").get<std::vector<std::string>>();
    inst.query.table_name = q.at("table").get<std::string>();
    inst.query.where_column = q.at("where_column").get<std::string>();
    const std::string cond = q.at("condition").get<std::string>();
    if (cond == "equals") inst.query.condition = ConditionKind::Equals;
    else if (cond == "greater") inst.query.condition = ConditionKind::Greater;
    else if (cond == "between_date_prefix") inst.query.condition = ConditionKind::BetweenDatePrefix;
    else throw std::invalid_argument("unknown condition: " + cond);
    const std::string form = q.at("input_form").get<std::string>();
    if (form == "double_quote") inst.query.input_form = EscapeKind::DoubleQuote;
    else if (form == "single_quote") inst.query.input_form = EscapeKind::SingleQuote;
    else if (form == "no_escape") inst.query.input_form = EscapeKind::NoEscape;
    else throw std::invalid_argument("unknown input form: " + form);
    inst.query.column_count = q.at("column_count").get<int>();
    return inst;
}

}  // namespace sqlrl
