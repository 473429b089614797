#include "freespiral/output.hpp"

#include <fstream>
#include <iomanip>
#include <iterator>

#include "freespiral/errors.hpp"

namespace freespiral {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    os << std::setprecision(17);
    return os;
}

}  // namespace

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw ConfigError("cannot create output directory '" + dir.string() + "'");
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto os = open_for_write(path);
    os << j.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto os = open_for_write(path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
}

void write_plot(const std::filesystem::path& path, const std::string& x_label, const std::string& y_label,
                const std::vector<double>& x, const std::vector<double>& y) {
    auto os = open_for_write(path);
    os << "# " << x_label << ' ' << y_label << '\n';
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) os << x[i] << ' ' << y[i] << '\n';
}

bool files_identical(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    return sa == sb;
}

}  // namespace freespiral
