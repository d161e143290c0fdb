#pragma once

#include <filesystem>

#include <Eigen/Core>

#include "gradiga/assembly.hpp"

namespace gradiga {

/// Legacy ASCII structured grid on the deformed sample points, `density`
/// subdivisions per element and direction. Point data: displacement, |u|,
/// strain and gradient energy densities, det F. Throws IoError.
void export_vtk(const NonlinearSystem& system, const Eigen::VectorXd& U, const std::filesystem::path& path,
                int density = 4);

}  // namespace gradiga
