#include "wassrobust/metrics.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "wassrobust/dataset.hpp"
#include "wassrobust/error.hpp"

namespace wassrobust {

namespace {

void put_text(std::string& out, const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        out += s;
        return;
    }
    out += '"';
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
}

void put_real(std::string& out, const std::optional<double>& v) {
    if (v) out += format_real(*v);
}

std::optional<double> get_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_real(s);
}

/// Splits RFC-4180 records; quoted cells may span lines.
std::vector<std::vector<std::string>> split_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
            continue;
        }
        any = true;
        if (ch == '"' && cell.empty()) {
            quoted = true;
        } else if (ch == ',') {
            record.push_back(std::move(cell));
            cell.clear();
        } else if (ch == '\n') {
            record.push_back(std::move(cell));
            cell.clear();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    if (quoted) throw FormatError("unterminated quoted cell in metrics file");
    if (any) {
        record.push_back(std::move(cell));
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace

std::string format_metrics(std::span<const MetricsRow> rows) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const MetricsRow& r : rows) {
        put_text(out, r.run);
        out += ',';
        put_text(out, r.algo);
        out += ',';
        out += std::to_string(r.iter);
        out += ',';
        put_real(out, r.objective);
        out += ',';
        put_real(out, r.stationarity);
        out += ',';
        put_real(out, r.clean_err);
        out += ',';
        put_text(out, r.attack);
        out += ',';
        put_real(out, r.eps);
        out += ',';
        put_real(out, r.adv_err);
        out += ',';
        put_real(out, r.ms);
        out += '\n';
    }
    return out;
}

std::vector<MetricsRow> parse_metrics(const std::string& text) {
    const auto records = split_records(text);
    if (records.empty()) throw FormatError("metrics file has no header");
    std::string header;
    for (std::size_t j = 0; j < records[0].size(); ++j) header += (j ? "," : "") + records[0][j];
    if (header != kMetricsHeader) throw FormatError("unexpected metrics header '" + header + "'");

    std::vector<MetricsRow> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& c = records[i];
        if (c.size() != 10) throw FormatError("metrics line " + std::to_string(i + 1) + " has the wrong cell count");
        MetricsRow r;
        r.run = c[0];
        r.algo = c[1];
        std::size_t iter = 0;
        const auto [ptr, ec] = std::from_chars(c[2].data(), c[2].data() + c[2].size(), iter);
        if (ec != std::errc() || ptr != c[2].data() + c[2].size())
            throw FormatError("metrics line " + std::to_string(i + 1) + " has a bad iteration");
        r.iter = iter;
        r.objective = get_real(c[3]);
        r.stationarity = get_real(c[4]);
        r.clean_err = get_real(c[5]);
        r.attack = c[6];
        r.eps = get_real(c[7]);
        r.adv_err = get_real(c[8]);
        r.ms = get_real(c[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create '" + tmp + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw IoError("failed writing '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

void write_metrics(std::span<const MetricsRow> rows, const std::string& path) {
    write_file_atomic(path, format_metrics(rows));
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_metrics({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace wassrobust
