#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nmfkit/matrix.hpp"
#include "nmfkit/nmf.hpp"

namespace nmfkit {

enum class MatrixFormat {
    csv,          // comma-separated reals, one row per line, no header
    matrixmarket, // coordinate real general subset, 1-based indices, densified
    pgm,          // P2/P5 maxval 255; one column per image, scaled to [0,1]
};

MatrixFormat format_from_string(const std::string& name);
std::string to_string(MatrixFormat format);

// Guesses from the extension (.csv, .mtx/.mm, .pgm); FormatError otherwise.
MatrixFormat detect_format(const std::filesystem::path& path);

/// Loads one matrix. For pgm the file contributes a single column of length
/// width*height. Negative entries are rejected: every consumer assumes V >= 0.
DenseMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);

/// Stacks several same-sized PGM images into one matrix, a column per image.
/// Returns the shared image dimensions through width/height.
DenseMatrix load_pgm_set(const std::vector<std::filesystem::path>& paths, std::size_t& width,
                         std::size_t& height);

// Expands a directory into its .pgm files (sorted by name); a plain file
// passes through untouched.
std::vector<std::filesystem::path> collect_pgm_paths(const std::filesystem::path& path);

void save_csv(const DenseMatrix& a, const std::filesystem::path& path);
void save_matrix_market(const DenseMatrix& a, const std::filesystem::path& path);

/// Writes column `column` of W*H as a binary PGM, clamped to [0,1] and
/// quantized to 0..255. width*height must equal the row count of W.
void save_reconstruction(const NmfModel& model, std::size_t column, std::size_t width,
                         std::size_t height, const std::filesystem::path& path);

} // namespace nmfkit
