#ifndef DRIFTLAB_STREAM_IO_HPP
#define DRIFTLAB_STREAM_IO_HPP

#include <fstream>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftlab/datamodel.hpp"

namespace driftlab {

/// Parse or read failure, carrying the 1-based source line it refers to.
class StreamIoError : public std::runtime_error {
public:
    StreamIoError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct ArffAttribute {
    std::string name;
    bool nominal = false;
    /// Nominal value domain, in declaration order; empty for numeric.
    std::vector<std::string> values;
};

/// The declarative part of an ARFF file. Only the subset used for stream
/// serialization is supported: numeric attributes plus exactly one nominal
/// class attribute. String, date, relational attributes and sparse rows are
/// rejected as unsupported.
struct ArffHeader {
    std::string relation_name;
    std::vector<ArffAttribute> attributes;
    std::size_t class_attribute_index = 0;

    std::size_t n_features() const { return attributes.size() - 1; }
    std::size_t n_classes() const {
        return attributes[class_attribute_index].values.size();
    }
};

/// Reads an ARFF header from the stream, consuming input up to and including
/// the @data line and leaving the stream at the first data row. `line`
/// carries the running 1-based line counter in and out.
///
/// Accepts case-insensitive keywords, '%' comments, blank lines, quoted
/// names, and CRLF endings. Throws StreamIoError (with line number) on:
/// missing @data, unsupported attribute types, duplicate attribute names
/// (case-insensitive), a nominal class with fewer than two values, or more
/// than one nominal attribute outside the class position.
ArffHeader parse_arff_header(std::istream& in, std::size_t& line);

/// Convenience overload starting the line counter at 0.
ArffHeader parse_arff_header(std::istream& in);

/// Streaming chunk reader over ARFF data rows. Holds at most one chunk of
/// rows in memory. The class attribute may sit anywhere; its nominal values
/// map to label indices in domain order.
class ArffChunkReader : public ChunkSource {
public:
    /// Parses the header from `in` immediately. The istream must outlive the
    /// reader.
    ArffChunkReader(std::istream& in, std::size_t chunk_size);

    /// Opens the file and parses its header. Throws StreamIoError when the
    /// file cannot be opened.
    ArffChunkReader(const std::string& path, std::size_t chunk_size);

    /// Next chunk of up to chunk_size rows; the final chunk may be short;
    /// nullopt once no rows remain. Throws StreamIoError on malformed rows,
    /// with their line numbers.
    std::optional<Chunk> next() override;

    std::size_t n_classes() const override { return header_.n_classes(); }
    std::size_t n_features() const override { return header_.n_features(); }
    const ArffHeader& header() const { return header_; }
    std::size_t rows_read() const { return rows_read_; }

private:
    std::unique_ptr<std::ifstream> owned_;
    std::istream* in_;
    std::size_t chunk_size_;
    std::size_t line_ = 0;
    std::size_t rows_read_ = 0;
    ArffHeader header_;
};

/// Chunk reader for the CSV fallback: one header row, all-numeric feature
/// columns, integer label in the last column. CSV carries no class domain,
/// so the caller declares n_classes.
class CsvChunkReader : public ChunkSource {
public:
    CsvChunkReader(std::istream& in, std::size_t chunk_size, std::size_t n_classes = 2);
    CsvChunkReader(const std::string& path, std::size_t chunk_size,
                   std::size_t n_classes = 2);

    std::optional<Chunk> next() override;

    std::size_t n_classes() const override { return n_classes_; }
    std::size_t n_features() const override { return n_features_; }

private:
    void read_header();

    std::unique_ptr<std::ifstream> owned_;
    std::istream* in_;
    std::size_t chunk_size_;
    std::size_t n_classes_;
    std::size_t n_features_ = 0;
    std::size_t line_ = 0;
};

enum class StreamFormat { arff, csv };

/// Drains `stream` into `sink` and returns the number of data rows written.
/// ARFF output round-trips through the reader to bit-identical labels and
/// features (values printed with 17 significant digits); CSV output starts
/// with the header row "f0,...,f{n-1},label". An empty stream yields a
/// header only.
std::size_t write_stream(std::ostream& sink, ChunkSource& stream, StreamFormat format,
                         const std::string& relation_name = "stream");

/// File-path convenience wrapper. Throws StreamIoError when the file cannot
/// be created.
std::size_t write_stream(const std::string& path, ChunkSource& stream,
                         StreamFormat format, const std::string& relation_name = "stream");

}  // namespace driftlab

#endif  // DRIFTLAB_STREAM_IO_HPP
