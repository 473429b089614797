#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "freespiral/dynamics.hpp"

namespace freespiral {

inline constexpr const char* kTrajectoryCsvHeader = "t,x,y,z,vx,vy,vz,mx,my,mz,Px,Py,Pz,Jx,Jy,Jz,s,T";

/// One row per sample, 17 significant digits so values round-trip exactly.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// Parses rows written by write_trajectory_csv (header required).
std::vector<std::vector<double>> read_csv_rows(std::istream& is, const std::string& expected_header);

}  // namespace freespiral
