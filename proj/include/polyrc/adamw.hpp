#ifndef POLYRC_ADAMW_HPP_
#define POLYRC_ADAMW_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace polyrc {

// Adam with optional decoupled weight decay (AdamW) over a fixed list of
// flat parameter blocks.
class AdamW {
 public:
  AdamW(const std::vector<std::span<double>>& params, double learning_rate,
        double weight_decay, bool decoupled)
      : lr_(learning_rate), wd_(decoupled ? weight_decay : 0.0) {
    for (const auto& p : params) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }

  // grads are multiplied by `scale` before use (e.g. 1 / batch size).
  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::span<double>>& grads, double scale = 1.0) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t b = 0; b < params.size(); ++b) {
      auto p = params[b];
      auto g = grads[b];
      auto& m = m_[b];
      auto& v = v_[b];
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double gi = g[i] * scale;
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * gi;
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * gi * gi;
        p[i] -= lr_ * wd_ * p[i];
        p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
      }
    }
  }

  std::size_t steps() const { return t_; }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  double lr_;
  double wd_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace polyrc

#endif  // POLYRC_ADAMW_HPP_
