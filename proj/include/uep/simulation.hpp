#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "uep/codec.hpp"

namespace uep::sim {

/// Noise variance for unit-energy BPSK at Eb/N0 (dB) and code rate R.
double sigma2_from_ebn0(double eb_n0_db, double rate);
/// Gaussian tail probability.
double q_function(double x);

/// Frame-level generator state, keyed by (seed, frame) so that a frame's
/// data and noise do not depend on how frames are scheduled.
std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame);

/// y = (1 - 2c) + N(0, sigma2), LLR = 2 y / sigma2.
std::vector<double> transmit_awgn(const code::Bits& codeword, double sigma2, std::mt19937_64& rng);

struct SimConfig {
  std::vector<double> snr_db;
  int max_iter = 50;
  long min_errors = 200;        // bit errors in `stop_class` that end a point
  long max_frames = 1000000;
  long min_frames = 0;          // keep going at least this long (smooths frame-error bursts)
  int stop_class = 0;           // most protected class
  std::uint64_t seed = 1;
  bool all_zero = false;        // skip encoding, send the all-zero codeword
  bool decode = true;           // false: hard decisions on the channel LLRs
  int threads = 1;
  int batch = 64;               // frames per scheduling round
};

struct SimPoint {
  double eb_n0_db = 0.0;
  double sigma2 = 0.0;
  std::vector<long> bits;          // per class
  std::vector<long> bit_errors;
  std::vector<long> class_frame_errors;
  long frames = 0;
  long frame_errors = 0;
  long iterations = 0;             // summed over frames
  std::uint64_t seed = 0;

  double ber(int j) const { return bits[j] ? static_cast<double>(bit_errors[j]) / bits[j] : 0.0; }
  double fer() const { return frames ? static_cast<double>(frame_errors) / frames : 0.0; }
  double mean_iterations() const { return frames ? static_cast<double>(iterations) / frames : 0.0; }
  /// A class estimate is confident once it has seen min_errors bit errors.
  bool confident(int j, long min_errors) const { return bit_errors[j] >= min_errors; }
};

/// Monte-Carlo BER per protection class (class labels from the matrix).
std::vector<SimPoint> run_ber(const code::SparseMatrix& h, const SimConfig& cfg);

struct ComparisonRow {
  double eb_n0_db = 0.0;
  std::string code;
  std::vector<double> ber;
  double ratio_c2_c1 = 0.0;  // BER(C2) / BER(C1); infinity when C1 saw no errors
};

/// Same SNR grid and seeds for every code.
std::vector<ComparisonRow> compare_profiles(const std::vector<code::SparseMatrix>& codes,
                                            const std::vector<std::string>& names, const SimConfig& cfg,
                                            std::vector<std::vector<SimPoint>>* points = nullptr);

void write_csv(std::ostream& os, const std::vector<SimPoint>& points, long min_errors);
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);
/// One "<prefix>_C<j>.dat" file per class: "eb_n0_db ber" lines.
std::vector<std::string> write_plot_data(const std::string& prefix, const std::vector<SimPoint>& points);

}  // namespace uep::sim
