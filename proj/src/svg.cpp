#include "lsnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lsnet/errors.hpp"

namespace lsnet {

namespace {

constexpr double kCanvas = 640.0;
constexpr double kMargin = 40.0;

struct Box {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

  void grow(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
};

}  // namespace

void write_positions_svg(const std::filesystem::path& path,
                         const std::vector<Eigen::MatrixXd>& draws,
                         const Eigen::MatrixXd* truth, int max_points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());

  std::int64_t total = 0;
  for (const auto& m : draws) total += m.cols();
  const std::int64_t stride =
      total > max_points ? (total + max_points - 1) / max_points : 1;

  Box box;
  bool first = true;
  auto seed_box = [&](double x, double y) {
    if (first) {
      box = {x, x, y, y};
      first = false;
    } else {
      box.grow(x, y);
    }
  };
  std::int64_t idx = 0;
  for (const auto& m : draws)
    for (Eigen::Index i = 0; i < m.cols(); ++i, ++idx)
      if (idx % stride == 0) seed_box(m(0, i), m(1, i));
  if (truth)
    for (Eigen::Index i = 0; i < truth->cols(); ++i)
      seed_box((*truth)(0, i), (*truth)(1, i));
  if (first) box = {-1, 1, -1, 1};

  const double range = std::max({box.xmax - box.xmin, box.ymax - box.ymin, 1e-9});
  const double scale = (kCanvas - 2.0 * kMargin) / range;
  auto sx = [&](double x) { return kMargin + (x - box.xmin) * scale; };
  auto sy = [&](double y) { return kCanvas - kMargin - (y - box.ymin) * scale; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas
      << "\" height=\"" << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " "
      << kCanvas << "\">\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kCanvas - 2 * kMargin << "\" height=\"" << kCanvas - 2 * kMargin
      << "\" fill=\"white\" stroke=\"black\"/>\n";

  idx = 0;
  for (const auto& m : draws)
    for (Eigen::Index i = 0; i < m.cols(); ++i, ++idx)
      if (idx % stride == 0)
        out << "<circle cx=\"" << sx(m(0, i)) << "\" cy=\"" << sy(m(1, i))
            << "\" r=\"1.6\" fill=\"#2166ac\" fill-opacity=\"0.25\"/>\n";

  if (truth) {
    for (Eigen::Index i = 0; i < truth->cols(); ++i) {
      const double cx = sx((*truth)(0, i));
      const double cy = sy((*truth)(1, i));
      out << "<polygon points=\"" << cx << "," << cy - 5 << " " << cx - 4.5 << ","
          << cy + 4 << " " << cx + 4.5 << "," << cy + 4
          << "\" fill=\"#b2182b\"/>\n";
    }
  }
  out << "</svg>\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace lsnet
