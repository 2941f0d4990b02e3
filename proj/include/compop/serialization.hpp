#pragma once

#include <string>

#include "json.hpp"

#include "compop/finite_section.hpp"
#include "compop/kernel_spectra.hpp"
#include "compop/rkhs_core.hpp"

namespace compop::io {

using json = nlohmann::json;

// {family, scale_or_bandwidth, dimension}; tabulated kernels carry
// {xi_min, xi_step, values, declared_bound?, u0?, decay?} instead.
json to_json(const kernels::KernelSpec& spec);
kernels::KernelSpec kernel_from_json(const json& j);

json to_json(const kernels::GridPolicy& grid);
kernels::GridPolicy grid_from_json(const json& j);

// {points, domain?: {lo, hi}, id?}
json to_json(const rkhs::PointCloud& cloud);
rkhs::PointCloud cloud_from_json(const json& j);

json to_json(const rkhs::DomainBox& box);
rkhs::DomainBox box_from_json(const json& j);

// {kind: affine|quadratic|scaled_exp|composite, ...}
json to_json(const fs::MapSpec& map);
fs::MapSpec map_from_json(const json& j, int dimension);

json to_json(const numerics::Matrix<double>& m);
numerics::Matrix<double> matrix_from_json(const json& j);

/// One row per matrix row, entries as "re,im" column pairs.
std::string gram_to_csv(const rkhs::GramMatrix& g);

}  // namespace compop::io
