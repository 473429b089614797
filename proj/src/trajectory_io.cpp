#include "freespiral/trajectory_io.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "freespiral/errors.hpp"

namespace freespiral {

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << kTrajectoryCsvHeader << '\n';
    os << std::setprecision(17);
    for (const auto& s : tr.samples) {
        const State& st = s.state;
        const Diagnostics& d = s.diag;
        os << st.t << ',' << st.r.x << ',' << st.r.y << ',' << st.r.z << ',' << st.v.x << ',' << st.v.y
           << ',' << st.v.z << ',' << st.m_hat.x << ',' << st.m_hat.y << ',' << st.m_hat.z << ',' << d.P.x
           << ',' << d.P.y << ',' << d.P.z << ',' << d.J.x << ',' << d.J.y << ',' << d.J.z << ',' << d.s
           << ',' << d.T << '\n';
    }
}

std::vector<std::vector<double>> read_csv_rows(std::istream& is, const std::string& expected_header) {
    std::string line;
    if (!std::getline(is, line) || line != expected_header) {
        throw PreconditionError("read_csv_rows: unexpected header");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw PreconditionError("read_csv_rows: bad number '" + cell + "'");
            }
            row.push_back(value);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace freespiral
