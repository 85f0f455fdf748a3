#include "driftlab/stream_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace driftlab {

namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

/// Strips one layer of single or double quotes, if present.
std::string_view unquote(std::string_view text) {
    if (text.size() >= 2 && (text.front() == '\'' || text.front() == '"') &&
        text.back() == text.front()) {
        return text.substr(1, text.size() - 2);
    }
    return text;
}

bool next_line(std::istream& in, std::string& out, std::size_t& line) {
    if (!std::getline(in, out)) return false;
    ++line;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
}

bool is_skippable(std::string_view text) {
    const std::string_view t = trim(text);
    return t.empty() || t.front() == '%';
}

/// Splits "<name> <rest>" where the name may be quoted and may then contain
/// spaces.
std::pair<std::string, std::string_view> split_name(std::string_view text,
                                                    std::size_t line) {
    text = trim(text);
    if (text.empty()) throw StreamIoError(line, "expected a name");
    if (text.front() == '\'' || text.front() == '"') {
        const char quote = text.front();
        const std::size_t end = text.find(quote, 1);
        if (end == std::string_view::npos) {
            throw StreamIoError(line, "unterminated quoted name");
        }
        return {std::string(text.substr(1, end - 1)), trim(text.substr(end + 1))};
    }
    const std::size_t end = text.find_first_of(" \t");
    if (end == std::string_view::npos) return {std::string(text), {}};
    return {std::string(text.substr(0, end)), trim(text.substr(end + 1))};
}

std::vector<std::string> split_csv(std::string_view text) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string_view field = comma == std::string_view::npos
                                           ? text.substr(start)
                                           : text.substr(start, comma - start);
        fields.emplace_back(unquote(trim(field)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_numeric(std::string_view token, std::size_t line, std::size_t column) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size() ||
        !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "unparsable numeric value '" << std::string(token) << "' in column "
            << column + 1;
        throw StreamIoError(line, msg.str());
    }
    return value;
}

ArffAttribute parse_attribute(std::string_view rest, std::size_t line) {
    auto [name, type_spec] = split_name(rest, line);
    if (name.empty()) throw StreamIoError(line, "attribute without a name");
    ArffAttribute attribute;
    attribute.name = std::move(name);
    if (type_spec.empty()) {
        throw StreamIoError(line, "attribute '" + attribute.name + "' without a type");
    }
    if (type_spec.front() == '{') {
        if (type_spec.back() != '}') {
            throw StreamIoError(line, "unterminated nominal value list");
        }
        attribute.nominal = true;
        for (const std::string& value :
             split_csv(type_spec.substr(1, type_spec.size() - 2))) {
            if (value.empty()) {
                throw StreamIoError(line, "empty value in nominal domain");
            }
            attribute.values.push_back(value);
        }
        if (attribute.values.empty()) {
            throw StreamIoError(line, "empty nominal domain");
        }
        return attribute;
    }
    const std::string type = lowercase(type_spec);
    if (type == "numeric" || type == "real" || type == "integer") {
        return attribute;
    }
    if (type == "string" || type.starts_with("date") || type == "relational") {
        throw StreamIoError(line, "unsupported attribute type '" + type +
                                      "' for attribute '" + attribute.name + "'");
    }
    throw StreamIoError(line, "unknown attribute type '" + std::string(type_spec) +
                                  "' for attribute '" + attribute.name + "'");
}

std::size_t resolve_class_attribute(const std::vector<ArffAttribute>& attributes,
                                    const std::vector<std::size_t>& attribute_lines,
                                    std::size_t data_line) {
    std::vector<std::size_t> nominal;
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].nominal) nominal.push_back(i);
    }
    if (nominal.empty()) {
        throw StreamIoError(data_line, "no nominal class attribute declared");
    }

    // The class is the last attribute unless exactly one nominal attribute
    // sits elsewhere.
    std::size_t class_index;
    if (attributes.back().nominal) {
        class_index = attributes.size() - 1;
    } else if (nominal.size() == 1) {
        class_index = nominal.front();
    } else {
        throw StreamIoError(attribute_lines[nominal[1]],
                            "non-numeric non-class attribute '" +
                                attributes[nominal[1]].name + "'");
    }

    for (std::size_t i : nominal) {
        if (i != class_index) {
            throw StreamIoError(attribute_lines[i],
                                "non-numeric non-class attribute '" +
                                    attributes[i].name + "'");
        }
    }
    if (attributes[class_index].values.size() < 2) {
        throw StreamIoError(attribute_lines[class_index],
                            "nominal class attribute '" + attributes[class_index].name +
                                "' needs at least 2 values");
    }
    return class_index;
}

}  // namespace

StreamIoError::StreamIoError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

ArffHeader parse_arff_header(std::istream& in, std::size_t& line) {
    ArffHeader header;
    std::vector<std::size_t> attribute_lines;
    bool saw_relation = false;
    std::string raw;
    while (next_line(in, raw, line)) {
        if (is_skippable(raw)) continue;
        const std::string_view content = trim(raw);
        auto [keyword, rest] = split_name(content, line);
        const std::string key = lowercase(keyword);
        if (key == "@relation") {
            auto [name, extra] = split_name(rest, line);
            (void)extra;
            header.relation_name = name;
            saw_relation = true;
        } else if (key == "@attribute") {
            ArffAttribute attribute = parse_attribute(rest, line);
            for (const ArffAttribute& existing : header.attributes) {
                if (lowercase(existing.name) == lowercase(attribute.name)) {
                    throw StreamIoError(line, "duplicate attribute name '" +
                                                  attribute.name + "'");
                }
            }
            header.attributes.push_back(std::move(attribute));
            attribute_lines.push_back(line);
        } else if (key == "@data") {
            if (!saw_relation) {
                throw StreamIoError(line, "@data before @relation");
            }
            if (header.attributes.empty()) {
                throw StreamIoError(line, "@data with no attributes declared");
            }
            header.class_attribute_index =
                resolve_class_attribute(header.attributes, attribute_lines, line);
            return header;
        } else {
            throw StreamIoError(line, "unexpected content before @data: '" +
                                          std::string(content) + "'");
        }
    }
    throw StreamIoError(line, "missing @data after " + std::to_string(line) + " lines");
}

ArffHeader parse_arff_header(std::istream& in) {
    std::size_t line = 0;
    return parse_arff_header(in, line);
}

ArffChunkReader::ArffChunkReader(std::istream& in, std::size_t chunk_size)
    : in_(&in), chunk_size_(chunk_size) {
    header_ = parse_arff_header(*in_, line_);
}

ArffChunkReader::ArffChunkReader(const std::string& path, std::size_t chunk_size)
    : owned_(std::make_unique<std::ifstream>(path)), in_(owned_.get()),
      chunk_size_(chunk_size) {
    if (!*owned_) {
        throw StreamIoError(0, "cannot open '" + path + "'");
    }
    header_ = parse_arff_header(*in_, line_);
}

std::optional<Chunk> ArffChunkReader::next() {
    const std::size_t n_features = header_.n_features();
    const std::size_t n_attributes = header_.attributes.size();
    const ArffAttribute& class_attribute =
        header_.attributes[header_.class_attribute_index];

    std::vector<double> values;
    values.reserve(chunk_size_ * n_features);
    std::vector<std::size_t> labels;
    labels.reserve(chunk_size_);

    std::string raw;
    while (labels.size() < chunk_size_ && next_line(*in_, raw, line_)) {
        if (is_skippable(raw)) continue;
        const std::string_view content = trim(raw);
        if (content.front() == '{') {
            throw StreamIoError(line_, "unsupported sparse instance format");
        }
        const std::vector<std::string> fields = split_csv(content);
        if (fields.size() != n_attributes) {
            std::ostringstream msg;
            msg << "row has " << fields.size() << " fields, expected " << n_attributes;
            throw StreamIoError(line_, msg.str());
        }
        for (std::size_t i = 0; i < n_attributes; ++i) {
            if (fields[i] == "?") {
                throw StreamIoError(line_, "missing value ('?') is not supported");
            }
            if (i == header_.class_attribute_index) {
                const auto found = std::find(class_attribute.values.begin(),
                                             class_attribute.values.end(), fields[i]);
                if (found == class_attribute.values.end()) {
                    throw StreamIoError(line_, "unknown nominal value '" + fields[i] +
                                                   "' for class attribute");
                }
                labels.push_back(static_cast<std::size_t>(
                    found - class_attribute.values.begin()));
            } else {
                values.push_back(parse_numeric(fields[i], line_, i));
            }
        }
    }

    if (labels.empty()) return std::nullopt;
    rows_read_ += labels.size();

    Matrix features(labels.size(), n_features);
    std::copy(values.begin(), values.end(), features.data().begin());
    return Chunk(std::move(features), std::move(labels));
}

CsvChunkReader::CsvChunkReader(std::istream& in, std::size_t chunk_size,
                               std::size_t n_classes)
    : in_(&in), chunk_size_(chunk_size), n_classes_(n_classes) {
    read_header();
}

CsvChunkReader::CsvChunkReader(const std::string& path, std::size_t chunk_size,
                               std::size_t n_classes)
    : owned_(std::make_unique<std::ifstream>(path)), in_(owned_.get()),
      chunk_size_(chunk_size), n_classes_(n_classes) {
    if (!*owned_) {
        throw StreamIoError(0, "cannot open '" + path + "'");
    }
    read_header();
}

void CsvChunkReader::read_header() {
    std::string raw;
    if (!next_line(*in_, raw, line_)) {
        throw StreamIoError(line_, "empty CSV file");
    }
    const std::vector<std::string> fields = split_csv(trim(raw));
    if (fields.size() < 2) {
        throw StreamIoError(line_, "CSV header needs at least one feature and a label");
    }
    n_features_ = fields.size() - 1;
}

std::optional<Chunk> CsvChunkReader::next() {
    std::vector<double> values;
    values.reserve(chunk_size_ * n_features_);
    std::vector<std::size_t> labels;
    labels.reserve(chunk_size_);

    std::string raw;
    while (labels.size() < chunk_size_ && next_line(*in_, raw, line_)) {
        if (is_skippable(raw)) continue;
        const std::vector<std::string> fields = split_csv(trim(raw));
        if (fields.size() != n_features_ + 1) {
            std::ostringstream msg;
            msg << "row has " << fields.size() << " fields, expected " << n_features_ + 1;
            throw StreamIoError(line_, msg.str());
        }
        for (std::size_t i = 0; i < n_features_; ++i) {
            values.push_back(parse_numeric(fields[i], line_, i));
        }
        std::size_t label = 0;
        const std::string& token = fields[n_features_];
        const auto [end, ec] =
            std::from_chars(token.data(), token.data() + token.size(), label);
        if (ec != std::errc{} || end != token.data() + token.size() ||
            label >= n_classes_) {
            throw StreamIoError(line_, "label '" + token + "' is not an integer in [0, " +
                                           std::to_string(n_classes_) + ")");
        }
        labels.push_back(label);
    }

    if (labels.empty()) return std::nullopt;
    Matrix features(labels.size(), n_features_);
    std::copy(values.begin(), values.end(), features.data().begin());
    return Chunk(std::move(features), std::move(labels));
}

namespace {

void append_value(std::string& out, double value) {
    char buffer[40];
    const int n = std::snprintf(buffer, sizeof buffer, "%.17g", value);
    out.append(buffer, static_cast<std::size_t>(n));
}

}  // namespace

std::size_t write_stream(std::ostream& sink, ChunkSource& stream, StreamFormat format,
                         const std::string& relation_name) {
    const std::size_t n_features = stream.n_features();
    const std::size_t n_classes = stream.n_classes();

    std::string header;
    if (format == StreamFormat::arff) {
        header += "@relation " + relation_name + "\n";
        for (std::size_t f = 0; f < n_features; ++f) {
            header += "@attribute f" + std::to_string(f) + " numeric\n";
        }
        header += "@attribute class {";
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (c > 0) header += ',';
            header += std::to_string(c);
        }
        header += "}\n@data\n";
    } else {
        for (std::size_t f = 0; f < n_features; ++f) {
            header += "f" + std::to_string(f) + ",";
        }
        header += "label\n";
    }
    sink << header;

    std::size_t rows = 0;
    std::string buffer;
    while (auto chunk = stream.next()) {
        buffer.clear();
        for (std::size_t r = 0; r < chunk->size(); ++r) {
            const auto row = chunk->features().row(r);
            for (double v : row) {
                append_value(buffer, v);
                buffer += ',';
            }
            buffer += std::to_string(chunk->labels()[r]);
            buffer += '\n';
        }
        sink << buffer;
        rows += chunk->size();
    }
    if (!sink) {
        throw StreamIoError(0, "write failed");
    }
    return rows;
}

std::size_t write_stream(const std::string& path, ChunkSource& stream,
                         StreamFormat format, const std::string& relation_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw StreamIoError(0, "cannot create '" + path + "'");
    }
    return write_stream(out, stream, format, relation_name);
}

}  // namespace driftlab
