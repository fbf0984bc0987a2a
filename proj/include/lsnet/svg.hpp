#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace lsnet {

// Scatter of posterior position draws (blue dots) with optional true
// coordinates (red triangles). Draws are subsampled to at most max_points
// dots. d = 2 only; higher dimensions plot the first two coordinates.
void write_positions_svg(const std::filesystem::path& path,
                         const std::vector<Eigen::MatrixXd>& draws,
                         const Eigen::MatrixXd* truth = nullptr,
                         int max_points = 4000);

}  // namespace lsnet
