#include "cusboost/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace cusboost {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == delim) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

bool parse_number(const std::string& token, double& out) {
    if (token.empty()) return false;
    char* end = nullptr;
    out = std::strtod(token.c_str(), &end);
    return end == token.c_str() + token.size();
}

struct RawAttribute {
    AttributeSchema schema;
    bool is_output = false;
};

// "@attribute name real [lo, hi]" | "@attribute name {a, b, c}" | "@attribute name integer"
AttributeSchema parse_attribute_line(const std::string& body, std::size_t line_no) {
    AttributeSchema attr;
    std::size_t brace = body.find('{');
    std::size_t name_end = std::min(brace, body.find_first_of(" \t["));
    if (name_end == 0 || name_end == std::string::npos)
        attr.name = trim(body);
    else
        attr.name = trim(body.substr(0, name_end));
    if (attr.name.empty()) throw ParseError("@attribute without a name", line_no);

    if (brace != std::string::npos) {
        std::size_t close = body.find('}', brace);
        if (close == std::string::npos)
            throw ParseError("unterminated category list for attribute " + attr.name, line_no);
        attr.kind = AttrKind::categorical;
        for (auto& tok : split(std::string_view(body).substr(brace + 1, close - brace - 1), ',')) {
            if (tok.empty())
                throw ParseError("empty category in attribute " + attr.name, line_no);
            attr.categories.push_back(tok);
        }
        if (attr.categories.empty())
            throw ParseError("attribute " + attr.name + " declares no categories", line_no);
        return attr;
    }

    attr.kind = AttrKind::numeric;
    std::string rest = trim(body.substr(std::min(name_end, body.size())));
    std::string rest_l = lower(rest);
    if (rest_l.rfind("real", 0) == 0) rest = trim(rest.substr(4));
    else if (rest_l.rfind("integer", 0) == 0) rest = trim(rest.substr(7));
    else if (rest_l.rfind("numeric", 0) == 0) rest = trim(rest.substr(7));
    else if (!rest.empty() && rest[0] != '[')
        throw ParseError("unknown attribute type '" + rest + "' for " + attr.name, line_no);

    if (!rest.empty()) {
        if (rest.front() != '[' || rest.back() != ']')
            throw ParseError("malformed range for attribute " + attr.name, line_no);
        auto parts = split(std::string_view(rest).substr(1, rest.size() - 2), ',');
        double lo, hi;
        if (parts.size() != 2 || !parse_number(parts[0], lo) || !parse_number(parts[1], hi))
            throw ParseError("malformed range for attribute " + attr.name, line_no);
        attr.declared_range = {lo, hi};
    }
    return attr;
}

} // namespace

Dataset parse_keel(std::istream& in, const std::string& name,
                   std::vector<std::string>* warnings) {
    std::string relation = name;
    std::vector<AttributeSchema> declared;
    std::vector<std::string> inputs, outputs;
    bool in_data = false;

    std::vector<std::string> data_lines;
    std::vector<std::size_t> data_line_nos;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        if (!in_data && t[0] == '@') {
            std::size_t sp = t.find_first_of(" \t");
            std::string keyword = lower(t.substr(1, sp == std::string::npos ? sp : sp - 1));
            std::string body = sp == std::string::npos ? "" : trim(t.substr(sp));
            if (keyword == "relation") {
                if (relation.empty()) relation = body;
            } else if (keyword == "attribute") {
                if (body.empty()) throw ParseError("@attribute without a body", line_no);
                declared.push_back(parse_attribute_line(body, line_no));
            } else if (keyword == "inputs") {
                inputs = split(body, ',');
            } else if (keyword == "outputs") {
                outputs = split(body, ',');
            } else if (keyword == "data") {
                in_data = true;
            } else {
                throw ParseError("unknown header keyword @" + keyword, line_no);
            }
            continue;
        }
        if (!in_data)
            throw ParseError("data row before @data section", line_no);
        data_lines.push_back(t);
        data_line_nos.push_back(line_no);
    }

    if (declared.empty()) throw ParseError("no @attribute declarations found");
    if (!in_data) throw ParseError("missing @data section");
    if (outputs.size() > 1) throw ParseError("multiple @outputs attributes are not supported");

    auto find_declared = [&](const std::string& n) -> int {
        for (std::size_t i = 0; i < declared.size(); ++i)
            if (declared[i].name == n) return static_cast<int>(i);
        return -1;
    };

    int output_idx;
    if (!outputs.empty()) {
        output_idx = find_declared(outputs[0]);
        if (output_idx < 0) throw ParseError("@outputs names unknown attribute " + outputs[0]);
    } else {
        output_idx = static_cast<int>(declared.size()) - 1;
    }

    // feature order: @inputs when present, else declaration order minus the output
    std::vector<int> feature_idx;
    if (!inputs.empty()) {
        for (const auto& n : inputs) {
            int i = find_declared(n);
            if (i < 0) throw ParseError("@inputs names unknown attribute " + n);
            if (i == output_idx) throw ParseError("@inputs lists the output attribute " + n);
            feature_idx.push_back(i);
        }
    } else {
        for (int i = 0; i < static_cast<int>(declared.size()); ++i)
            if (i != output_idx) feature_idx.push_back(i);
    }
    if (feature_idx.empty()) throw ParseError("dataset has no input attributes");

    const AttributeSchema& out_attr = declared[output_idx];
    std::vector<AttributeSchema> schema;
    for (int i : feature_idx) schema.push_back(declared[i]);

    std::vector<double> values;
    values.reserve(data_lines.size() * feature_idx.size());
    std::vector<std::string> label_tokens;
    label_tokens.reserve(data_lines.size());

    for (std::size_t r = 0; r < data_lines.size(); ++r) {
        std::size_t ln = data_line_nos[r];
        auto tokens = split(data_lines[r], ',');
        if (tokens.size() != declared.size())
            throw ParseError("row has " + std::to_string(tokens.size()) + " values, expected " +
                                 std::to_string(declared.size()),
                             ln);
        for (std::size_t f = 0; f < feature_idx.size(); ++f) {
            const auto& tok = tokens[feature_idx[f]];
            const auto& attr = declared[feature_idx[f]];
            if (tok == "?")
                throw ParseError("missing value in attribute " + attr.name +
                                     "; missing values are not supported",
                                 ln);
            if (attr.kind == AttrKind::categorical) {
                int c = attr.category_index(tok);
                if (c < 0)
                    throw ParseError("unknown category '" + tok + "' for attribute " + attr.name,
                                     ln);
                values.push_back(c);
            } else {
                double v;
                if (!parse_number(tok, v))
                    throw ParseError("non-numeric value '" + tok + "' for attribute " + attr.name,
                                     ln);
                if (warnings && attr.declared_range &&
                    (v < attr.declared_range->first || v > attr.declared_range->second)) {
                    std::ostringstream w;
                    w << "value " << v << " outside declared range of attribute " << attr.name
                      << " (line " << ln << ")";
                    warnings->push_back(w.str());
                }
                values.push_back(v);
            }
        }
        const auto& ltok = tokens[output_idx];
        if (ltok == "?")
            throw ParseError("missing class label; missing values are not supported", ln);
        if (out_attr.kind == AttrKind::categorical && out_attr.category_index(ltok) < 0)
            throw ParseError("unknown class label '" + ltok + "'", ln);
        label_tokens.push_back(ltok);
    }

    // class table: declared categories restricted to the observed ones, else
    // (numeric output) distinct tokens in order of first appearance
    std::vector<std::string> class_labels;
    if (out_attr.kind == AttrKind::categorical) {
        for (const auto& cat : out_attr.categories) {
            if (std::find(label_tokens.begin(), label_tokens.end(), cat) != label_tokens.end())
                class_labels.push_back(cat);
        }
    } else {
        for (const auto& tok : label_tokens)
            if (std::find(class_labels.begin(), class_labels.end(), tok) == class_labels.end())
                class_labels.push_back(tok);
    }

    std::vector<int> labels;
    labels.reserve(label_tokens.size());
    for (const auto& tok : label_tokens) {
        auto it = std::find(class_labels.begin(), class_labels.end(), tok);
        labels.push_back(static_cast<int>(it - class_labels.begin()));
    }

    Dataset ds(relation.empty() ? "dataset" : relation, std::move(schema),
               std::move(class_labels), out_attr.name, std::move(values), std::move(labels));
    ds.validate();
    return ds;
}

void write_keel(const Dataset& ds, std::ostream& out) {
    out << "@relation " << ds.name() << "\n";
    out << std::setprecision(17);
    for (const auto& a : ds.schema()) {
        out << "@attribute " << a.name << " ";
        if (a.kind == AttrKind::categorical) {
            out << "{";
            for (std::size_t i = 0; i < a.categories.size(); ++i)
                out << (i ? ", " : "") << a.categories[i];
            out << "}";
        } else {
            out << "real";
            if (a.declared_range)
                out << " [" << a.declared_range->first << ", " << a.declared_range->second << "]";
        }
        out << "\n";
    }
    out << "@attribute " << ds.label_name() << " {";
    for (std::size_t i = 0; i < ds.class_labels().size(); ++i)
        out << (i ? ", " : "") << ds.class_labels()[i];
    out << "}\n";
    out << "@inputs ";
    for (std::size_t i = 0; i < ds.schema().size(); ++i)
        out << (i ? ", " : "") << ds.schema()[i].name;
    out << "\n@outputs " << ds.label_name() << "\n@data\n";
    for (std::size_t i = 0; i < ds.num_instances(); ++i) {
        for (std::size_t j = 0; j < ds.num_features(); ++j) {
            if (j) out << ", ";
            if (ds.schema()[j].kind == AttrKind::categorical)
                out << ds.schema()[j].categories[static_cast<int>(ds.value(i, j))];
            else
                out << ds.value(i, j);
        }
        out << ", " << ds.label_text(i) << "\n";
    }
}

Dataset parse_delimited(std::istream& in, char delimiter,
                        std::optional<std::size_t> label_column, const std::string& name) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::size_t> row_line_nos;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        rows.push_back(split(t, delimiter));
        row_line_nos.push_back(line_no);
    }
    if (rows.empty()) throw ParseError("empty input");

    std::size_t cols = rows[0].size();
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].size() != cols)
            throw ParseError("ragged row: has " + std::to_string(rows[r].size()) +
                                 " values, expected " + std::to_string(cols),
                             row_line_nos[r]);
    if (cols < 2) throw ParseError("need at least one feature column and one label column");

    auto numeric_token = [](const std::string& t) {
        double v;
        return parse_number(t, v);
    };

    // header row: all tokens non-numeric while at least one column is numeric
    // over the remaining rows
    bool header = false;
    if (rows.size() >= 2) {
        bool first_all_text = std::none_of(rows[0].begin(), rows[0].end(), numeric_token);
        if (first_all_text) {
            for (std::size_t c = 0; c < cols && !header; ++c) {
                bool col_numeric = true;
                for (std::size_t r = 1; r < rows.size(); ++r)
                    col_numeric = col_numeric && numeric_token(rows[r][c]);
                header = col_numeric;
            }
        }
    }

    std::vector<std::string> col_names(cols);
    for (std::size_t c = 0; c < cols; ++c)
        col_names[c] = header ? rows[0][c] : "x" + std::to_string(c);
    std::size_t first_data = header ? 1 : 0;
    if (first_data >= rows.size()) throw ParseError("no data rows after header");

    std::size_t label_col = label_column.value_or(cols - 1);
    if (label_col >= cols) throw ParseError("label column index out of range");

    for (std::size_t r = first_data; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (rows[r][c] == "?")
                throw ParseError("missing value; missing values are not supported",
                                 row_line_nos[r]);

    std::vector<AttributeSchema> schema;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < cols; ++c) {
        if (c == label_col) continue;
        feature_cols.push_back(c);
        AttributeSchema attr;
        attr.name = col_names[c];
        bool all_numeric = true;
        for (std::size_t r = first_data; r < rows.size(); ++r)
            all_numeric = all_numeric && numeric_token(rows[r][c]);
        if (all_numeric) {
            attr.kind = AttrKind::numeric;
        } else {
            attr.kind = AttrKind::categorical;
            for (std::size_t r = first_data; r < rows.size(); ++r)
                if (attr.category_index(rows[r][c]) < 0) attr.categories.push_back(rows[r][c]);
        }
        schema.push_back(std::move(attr));
    }

    std::vector<std::string> class_labels;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const auto& tok = rows[r][label_col];
        if (std::find(class_labels.begin(), class_labels.end(), tok) == class_labels.end())
            class_labels.push_back(tok);
    }

    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const auto& tok = rows[r][feature_cols[f]];
            if (schema[f].kind == AttrKind::numeric) {
                double v;
                parse_number(tok, v);
                values.push_back(v);
            } else {
                values.push_back(schema[f].category_index(tok));
            }
        }
        auto it = std::find(class_labels.begin(), class_labels.end(), rows[r][label_col]);
        labels.push_back(static_cast<int>(it - class_labels.begin()));
    }

    Dataset ds(name.empty() ? "dataset" : name, std::move(schema), std::move(class_labels),
               header ? col_names[label_col] : "class", std::move(values), std::move(labels));
    ds.validate();
    return ds;
}

Dataset load_dataset(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string stem = path;
    if (auto pos = stem.find_last_of('/'); pos != std::string::npos) stem = stem.substr(pos + 1);
    std::string ext;
    if (auto pos = stem.find_last_of('.'); pos != std::string::npos) {
        ext = lower(stem.substr(pos + 1));
        stem = stem.substr(0, pos);
    }

    if (ext == "dat" || ext == "keel") return parse_keel(in, stem, warnings);

    std::string first_line;
    std::getline(in, first_line);
    in.seekg(0);
    char delim = ',';
    std::size_t best = std::count(first_line.begin(), first_line.end(), ',');
    for (char cand : {';', '\t'}) {
        std::size_t n = std::count(first_line.begin(), first_line.end(), cand);
        if (n > best) {
            best = n;
            delim = cand;
        }
    }
    return parse_delimited(in, delim, {}, stem);
}

} // namespace cusboost
