#pragma once

#include <spectrafw/model.hpp>

#include <filesystem>

namespace spectrafw {

/// Writes a least-squares instance as <dir>/manifest.json plus raw
/// little-endian float64 arrays. Only instances built on QuadraticSensingMap
/// and LeastSquaresLoss can be saved; anything else throws InputError.
void save_instance(const ProblemInstance &inst, const std::filesystem::path &dir);

/// Inverse of save_instance. Throws ParseError naming the offending field or
/// file; never returns a partially read instance.
ProblemInstance load_instance(const std::filesystem::path &dir);

} // namespace spectrafw
