#include "cavity/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavity {

void validate(const ScanRecord& rec) {
    if (rec.axis_value.empty() || rec.axis_value.size() != rec.signal_v.size())
        throw std::invalid_argument("scan: empty or ragged sample arrays");
    const bool ascending = rec.axis_value.back() > rec.axis_value.front();
    for (std::size_t i = 1; i < rec.axis_value.size(); ++i) {
        const double d = rec.axis_value[i] - rec.axis_value[i - 1];
        if (ascending ? d <= 0.0 : d >= 0.0)
            throw std::invalid_argument("scan: axis must be strictly monotone");
    }
    for (double s : rec.signal_v)
        if (s < 0.0) throw std::invalid_argument("scan: negative signal");
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double failed");
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const std::filesystem::path& path,
                    int line_no) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || end != begin + s.size()) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": bad number '" << s << "'";
        throw std::invalid_argument(msg.str());
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);  // LF even on exotic platforms
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return is;
}

void write_metadata(std::ofstream& os,
                    const std::map<std::string, std::string>& metadata) {
    for (const auto& [k, v] : metadata) os << "#" << k << "=" << v << "\n";
}

// Reads '#key=value' lines; leaves the stream at the header line.
std::map<std::string, std::string> read_metadata(std::ifstream& is,
                                                 std::string& header,
                                                 int& line_no) {
    std::map<std::string, std::string> meta;
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos)
                meta[line.substr(1, eq - 1)] = line.substr(eq + 1);
            continue;
        }
        header = line;
        return meta;
    }
    header.clear();
    return meta;
}

}  // namespace

void write_mode_points(const std::filesystem::path& path,
                       const std::vector<ModePoint>& points,
                       const std::map<std::string, std::string>& metadata) {
    auto os = open_out(path);
    write_metadata(os, metadata);
    os << "length_offset_m,frequency_hz\n";
    for (const auto& p : points)
        os << format_double(p.length_offset_m) << ","
           << format_double(p.frequency_hz) << "\n";
}

std::vector<ModePoint> read_mode_points(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string header;
    int line_no = 0;
    read_metadata(is, header, line_no);
    if (header != "length_offset_m,frequency_hz")
        throw std::invalid_argument(path.string() +
                                    ": expected header 'length_offset_m,frequency_hz'");
    std::vector<ModePoint> out;
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2)
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(line_no) + ": need 2 columns");
        out.push_back({parse_double(cells[0], path, line_no),
                       parse_double(cells[1], path, line_no)});
    }
    if (out.empty())
        throw std::invalid_argument(path.string() + ": no data rows");
    return out;
}

void write_scan(const std::filesystem::path& path, const ScanRecord& rec) {
    validate(rec);
    auto os = open_out(path);
    std::map<std::string, std::string> meta = rec.metadata;
    meta["axis"] = rec.axis == ScanAxis::cavity_length ? "cavity_length"
                                                       : "laser_frequency";
    if (rec.sideband_offset_hz)
        meta["sideband_offset_hz"] = format_double(*rec.sideband_offset_hz);
    write_metadata(os, meta);
    const bool with_sync = rec.sync_offset_s.has_value();
    os << (with_sync ? "axis_value,signal_v,sync_offset_s\n"
                     : "axis_value,signal_v\n");
    for (std::size_t i = 0; i < rec.axis_value.size(); ++i) {
        os << format_double(rec.axis_value[i]) << ","
           << format_double(rec.signal_v[i]);
        if (with_sync) os << "," << format_double(*rec.sync_offset_s);
        os << "\n";
    }
}

ScanRecord read_scan(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string header;
    int line_no = 0;
    ScanRecord rec;
    rec.metadata = read_metadata(is, header, line_no);

    bool with_sync = false;
    if (header == "axis_value,signal_v,sync_offset_s")
        with_sync = true;
    else if (header != "axis_value,signal_v")
        throw std::invalid_argument(
            path.string() + ": expected header 'axis_value,signal_v[,sync_offset_s]'");

    if (auto it = rec.metadata.find("axis"); it != rec.metadata.end()) {
        if (it->second == "laser_frequency")
            rec.axis = ScanAxis::laser_frequency;
        else if (it->second == "cavity_length")
            rec.axis = ScanAxis::cavity_length;
        else
            throw std::invalid_argument(path.string() + ": unknown axis '" +
                                        it->second + "'");
    }
    if (auto it = rec.metadata.find("sideband_offset_hz"); it != rec.metadata.end())
        rec.sideband_offset_hz = parse_double(it->second, path, 0);

    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != (with_sync ? 3u : 2u))
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(line_no) +
                                        ": wrong column count");
        rec.axis_value.push_back(parse_double(cells[0], path, line_no));
        rec.signal_v.push_back(parse_double(cells[1], path, line_no));
        if (with_sync) rec.sync_offset_s = parse_double(cells[2], path, line_no);
    }
    validate(rec);
    return rec;
}

std::vector<ScanRecord> read_scan_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw std::invalid_argument(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<ScanRecord> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(read_scan(f));
    if (out.empty())
        throw std::invalid_argument(dir.string() + ": no .csv files");
    return out;
}

}  // namespace cavity
