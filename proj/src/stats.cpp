#include "ips/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ips/errors.hpp"
#include "ips/parallel.hpp"

namespace ips {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("IPS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 16) {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

MeanStdErr mean_stderr(std::span<const double> values) {
  MeanStdErr r;
  r.n = values.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(values) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - r.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(r.n - 1);
  r.std_error = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw input_error("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  // Kolmogorov asymptotic tail with the usual finite-n adjustment.
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-8) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double chi2_sf(double x, int dof) {
  if (dof <= 0) throw input_error("chi2_sf: dof must be positive");
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double normal_quantile(double p) {
  boost::math::normal_distribution<double> n01;
  return boost::math::quantile(n01, p);
}

namespace {

Chi2Result chi2_from_cells(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  Chi2Result r;
  r.statistic = stat;
  r.dof = static_cast<int>(observed.size()) - 1;
  r.p_value = r.dof > 0 ? chi2_sf(stat, r.dof) : 1.0;
  return r;
}

}  // namespace

Chi2Result chi2_gof_poisson(std::span<const std::size_t> histogram, double mean,
                            double min_expected) {
  std::size_t n = 0;
  for (auto c : histogram) n += c;
  if (n == 0) throw input_error("chi2_gof_poisson: empty histogram");

  // Poisson cell probabilities, last histogram slot extended to the full tail.
  std::vector<double> probs(histogram.size());
  double pmf = std::exp(-mean);
  double cum = 0;
  for (std::size_t k = 0; k + 1 < histogram.size(); ++k) {
    probs[k] = pmf;
    cum += pmf;
    pmf *= mean / static_cast<double>(k + 1);
  }
  probs.back() = std::max(0.0, 1.0 - cum);

  std::vector<double> obs, exp_counts;
  double o_acc = 0, e_acc = 0;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    o_acc += static_cast<double>(histogram[k]);
    e_acc += probs[k] * static_cast<double>(n);
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp_counts.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (!obs.empty()) {
      obs.back() += o_acc;
      exp_counts.back() += e_acc;
    } else {
      obs.push_back(o_acc);
      exp_counts.push_back(e_acc);
    }
  }
  if (obs.size() < 2) throw insufficient_data_error("chi2_gof_poisson: fewer than 2 usable bins");
  return chi2_from_cells(obs, exp_counts);
}

Chi2Result chi2_two_sample(std::span<const std::size_t> counts_a,
                           std::span<const std::size_t> counts_b, double min_expected) {
  if (counts_a.size() != counts_b.size())
    throw input_error("chi2_two_sample: category count mismatch");
  double na = 0, nb = 0;
  for (auto c : counts_a) na += static_cast<double>(c);
  for (auto c : counts_b) nb += static_cast<double>(c);
  if (na == 0 || nb == 0) throw input_error("chi2_two_sample: empty sample");

  // Pool adjacent categories until both pooled expectations are large enough.
  std::vector<double> oa, ob;
  double aa = 0, bb = 0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    aa += static_cast<double>(counts_a[i]);
    bb += static_cast<double>(counts_b[i]);
    const double pooled = (aa + bb) / (na + nb);
    if (pooled * na >= min_expected && pooled * nb >= min_expected) {
      oa.push_back(aa);
      ob.push_back(bb);
      aa = bb = 0;
    }
  }
  if (aa > 0 || bb > 0) {
    if (!oa.empty()) {
      oa.back() += aa;
      ob.back() += bb;
    } else {
      oa.push_back(aa);
      ob.push_back(bb);
    }
  }
  if (oa.size() < 2) throw insufficient_data_error("chi2_two_sample: fewer than 2 usable bins");

  double stat = 0;
  for (std::size_t i = 0; i < oa.size(); ++i) {
    const double pooled = (oa[i] + ob[i]) / (na + nb);
    const double ea = pooled * na;
    const double eb = pooled * nb;
    stat += (oa[i] - ea) * (oa[i] - ea) / ea + (ob[i] - eb) * (ob[i] - eb) / eb;
  }
  Chi2Result r;
  r.statistic = stat;
  r.dof = static_cast<int>(oa.size()) - 1;
  r.p_value = r.dof > 0 ? chi2_sf(stat, r.dof) : 1.0;
  return r;
}

}  // namespace ips
