#include "uep/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace uep::sim {

double sigma2_from_ebn0(double eb_n0_db, double rate) {
  if (!(rate > 0.0)) throw DomainError("sigma2_from_ebn0: rate must be positive");
  return 1.0 / (2.0 * rate * std::pow(10.0, eb_n0_db / 10.0));
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame) {
  // two rounds of splitmix64 over (seed, frame)
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(seed) ^ frame);
}

std::vector<double> transmit_awgn(const code::Bits& codeword, double sigma2, std::mt19937_64& rng) {
  if (!(sigma2 > 0.0)) throw DomainError("transmit_awgn: sigma2 must be positive");
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  std::vector<double> llr(codeword.size());
  for (std::size_t i = 0; i < codeword.size(); ++i) {
    const double y = (codeword[i] ? -1.0 : 1.0) + noise(rng);
    llr[i] = 2.0 * y / sigma2;
  }
  return llr;
}

namespace {

struct FrameOutcome {
  std::vector<long> errors;
  int iterations = 0;
};

class FrameRunner {
 public:
  FrameRunner(const code::SparseMatrix& h, const SimConfig& cfg, int classes)
      : h_(h), cfg_(cfg), classes_(classes), dec_(h) {}

  FrameOutcome run(std::uint64_t frame, double sigma2) {
    std::mt19937_64 rng(frame_seed(cfg_.seed, frame));
    const int k = h_.n - h_.m;
    code::Bits cw;
    if (cfg_.all_zero) {
      cw.assign(h_.n, 0);
    } else {
      code::Bits info(k);
      std::uint64_t word = 0;
      for (int i = 0; i < k; ++i) {
        if (i % 64 == 0) word = rng();
        info[i] = (word >> (i % 64)) & 1;
      }
      cw = code::encode(h_, info);
    }
    const auto llr = transmit_awgn(cw, sigma2, rng);
    FrameOutcome out;
    out.errors.assign(classes_, 0);
    if (cfg_.decode) {
      const auto res = dec_.decode(llr, cfg_.max_iter);
      out.iterations = res.iterations;
      for (int c = 0; c < h_.n; ++c) {
        if (res.bits[c] != cw[c]) ++out.errors[h_.class_of_column[c]];
      }
    } else {
      for (int c = 0; c < h_.n; ++c) {
        if ((llr[c] < 0.0 ? 1 : 0) != cw[c]) ++out.errors[h_.class_of_column[c]];
      }
    }
    return out;
  }

 private:
  const code::SparseMatrix& h_;
  const SimConfig& cfg_;
  int classes_;
  code::BpDecoder dec_;
};

}  // namespace

std::vector<SimPoint> run_ber(const code::SparseMatrix& h, const SimConfig& cfg) {
  if (cfg.batch < 1 || cfg.min_errors < 1 || cfg.max_frames < 1) throw DomainError("run_ber: bad stop rule");
  const int classes = std::max(1, h.classes());
  if (cfg.stop_class < 0 || cfg.stop_class >= classes) throw DomainError("run_ber: stop class out of range");
  const double rate = static_cast<double>(h.n - h.m) / h.n;
  std::vector<long> class_size(classes, 0);
  for (int c : h.class_of_column) ++class_size[c];

  const int workers = std::max(1, cfg.threads);
  std::vector<FrameRunner> runners;
  runners.reserve(workers);
  for (int w = 0; w < workers; ++w) runners.emplace_back(h, cfg, classes);

  std::vector<SimPoint> points;
  for (double snr : cfg.snr_db) {
    SimPoint pt;
    pt.eb_n0_db = snr;
    pt.sigma2 = sigma2_from_ebn0(snr, rate);
    pt.seed = cfg.seed;
    pt.bits.assign(classes, 0);
    pt.bit_errors.assign(classes, 0);
    pt.class_frame_errors.assign(classes, 0);
    std::vector<FrameOutcome> batch;
    while (pt.frames < cfg.max_frames &&
           (pt.bit_errors[cfg.stop_class] < cfg.min_errors || pt.frames < cfg.min_frames)) {
      const long count = std::min<long>(cfg.batch, cfg.max_frames - pt.frames);
      batch.assign(count, {});
      auto work = [&](int w) {
        for (long f = w; f < count; f += workers) {
          batch[f] = runners[w].run(static_cast<std::uint64_t>(pt.frames + f), pt.sigma2);
        }
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
      }
      for (const auto& o : batch) {
        bool any = false;
        for (int j = 0; j < classes; ++j) {
          pt.bits[j] += class_size[j];
          pt.bit_errors[j] += o.errors[j];
          if (o.errors[j]) {
            ++pt.class_frame_errors[j];
            any = true;
          }
        }
        pt.frame_errors += any ? 1 : 0;
        pt.iterations += o.iterations;
        ++pt.frames;
      }
    }
    points.push_back(std::move(pt));
  }
  return points;
}

std::vector<ComparisonRow> compare_profiles(const std::vector<code::SparseMatrix>& codes,
                                            const std::vector<std::string>& names, const SimConfig& cfg,
                                            std::vector<std::vector<SimPoint>>* points) {
  if (codes.size() != names.size()) throw DomainError("compare_profiles: one name per code");
  std::vector<std::vector<SimPoint>> all;
  for (const auto& h : codes) all.push_back(run_ber(h, cfg));
  std::vector<ComparisonRow> rows;
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    for (std::size_t c = 0; c < codes.size(); ++c) {
      const auto& pt = all[c][s];
      ComparisonRow row;
      row.eb_n0_db = pt.eb_n0_db;
      row.code = names[c];
      for (std::size_t j = 0; j < pt.bits.size(); ++j) row.ber.push_back(pt.ber(static_cast<int>(j)));
      if (row.ber.size() >= 2) {
        row.ratio_c2_c1 = row.ber[0] > 0.0 ? row.ber[1] / row.ber[0] : std::numeric_limits<double>::infinity();
      }
      rows.push_back(std::move(row));
    }
  }
  if (points) *points = std::move(all);
  return rows;
}

void write_csv(std::ostream& os, const std::vector<SimPoint>& points, long min_errors) {
  os << "eb_n0_db,class,bits,bit_errors,ber,frames,frame_errors,fer,mean_iters,confident\n";
  char buf[256];
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.bits.size(); ++j) {
      const int jj = static_cast<int>(j);
      const double fer = p.frames ? static_cast<double>(p.class_frame_errors[j]) / p.frames : 0.0;
      std::snprintf(buf, sizeof buf, "%.4f,%d,%ld,%ld,%.6e,%ld,%ld,%.6e,%.4f,%d\n", p.eb_n0_db, jj + 1, p.bits[j],
                    p.bit_errors[j], p.ber(jj), p.frames, p.class_frame_errors[j], fer, p.mean_iterations(),
                    p.confident(jj, min_errors) ? 1 : 0);
      os << buf;
    }
  }
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "eb_n0_db,code";
  const std::size_t classes = rows.empty() ? 0 : rows.front().ber.size();
  for (std::size_t j = 0; j < classes; ++j) os << ",ber_c" << (j + 1);
  os << ",ratio_c2_c1\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f", r.eb_n0_db);
    os << buf << ',' << r.code;
    for (double b : r.ber) {
      std::snprintf(buf, sizeof buf, ",%.6e", b);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6e\n", r.ratio_c2_c1);
    os << buf;
  }
}

std::vector<std::string> write_plot_data(const std::string& prefix, const std::vector<SimPoint>& points) {
  std::vector<std::string> files;
  if (points.empty()) return files;
  for (std::size_t j = 0; j < points.front().bits.size(); ++j) {
    const std::string path = prefix + "_C" + std::to_string(j + 1) + ".dat";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "# eb_n0_db ber\n";
    char buf[64];
    for (const auto& p : points) {
      std::snprintf(buf, sizeof buf, "%.4f %.6e\n", p.eb_n0_db, p.ber(static_cast<int>(j)));
      f << buf;
    }
    files.push_back(path);
  }
  return files;
}

}  // namespace uep::sim
