#include "optrx/coded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "optrx/photodetect.hpp"
#include "optrx/renyi.hpp"

namespace optrx {

double Codebook::mean_photon_number() const {
    double sum = 0.0;
    for (std::size_t x = 0; x < alphabet.size(); ++x)
        sum += static_cast<double>(composition[x]) * std::norm(alphabet[x]);
    return sum / static_cast<double>(message_count);
}

Codebook build_codebook(std::size_t message_count, std::size_t block_length,
                        std::vector<Amplitude> alphabet, std::vector<double> design_dist, Rng& rng) {
    if (message_count < 2 || message_count > kMaxMessages)
        throw std::invalid_argument("build_codebook: message count must be in [2, 2^16]");
    if (block_length < 1 || block_length > kMaxBlockLength)
        throw std::invalid_argument("build_codebook: block length must be in [1, 2^14]");
    if (alphabet.empty() || alphabet.size() != design_dist.size())
        throw std::invalid_argument("build_codebook: alphabet and distribution sizes differ");
    if (alphabet.size() > std::numeric_limits<std::uint16_t>::max())
        throw std::invalid_argument("build_codebook: alphabet too large");

    double sum = 0.0;
    for (double p : design_dist) {
        if (!(p >= 0.0)) throw std::invalid_argument("build_codebook: negative design probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("build_codebook: design distribution must sum to 1");
    for (double& p : design_dist) p /= sum;

    // Closest integer composition by largest remainder.
    const auto M = message_count;
    std::vector<std::uint32_t> counts(alphabet.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t x = 0; x < alphabet.size(); ++x) {
        const double exact = design_dist[x] * static_cast<double>(M);
        counts[x] = static_cast<std::uint32_t>(std::floor(exact));
        assigned += counts[x];
        remainders.emplace_back(exact - std::floor(exact), x);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < M; ++r, ++assigned) counts[remainders[r % remainders.size()].second]++;
    for (std::size_t x = 0; x < alphabet.size(); ++x)
        if (design_dist[x] > 0.0 && counts[x] == 0)
            throw std::invalid_argument("build_codebook: composition drops a required symbol");

    Codebook cb;
    cb.message_count = M;
    cb.block_length = block_length;
    cb.alphabet = std::move(alphabet);
    cb.design_dist = std::move(design_dist);
    cb.composition = counts;
    cb.table.resize(M * block_length);

    std::vector<std::uint16_t> column(M);
    {
        std::size_t pos = 0;
        for (std::size_t x = 0; x < counts.size(); ++x)
            for (std::uint32_t c = 0; c < counts[x]; ++c) column[pos++] = static_cast<std::uint16_t>(x);
    }
    for (std::size_t i = 0; i < block_length; ++i) {
        std::vector<std::uint16_t> perm = column;
        for (std::size_t j = M - 1; j > 0; --j)
            std::swap(perm[j], perm[rng.next_below(j + 1)]);
        std::copy(perm.begin(), perm.end(), cb.table.begin() + static_cast<std::ptrdiff_t>(i * M));
    }
    return cb;
}

MessagePosterior::MessagePosterior(std::size_t message_count)
    : log_weights_(message_count, 0.0) {
    if (message_count == 0) throw std::invalid_argument("MessagePosterior: empty");
}

MessagePosterior::MessagePosterior(const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("MessagePosterior: empty");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("MessagePosterior: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("MessagePosterior: probabilities must sum to 1");
    log_weights_.resize(probs.size());
    for (std::size_t m = 0; m < probs.size(); ++m)
        log_weights_[m] = probs[m] > 0.0 ? std::log(probs[m] / sum)
                                         : -std::numeric_limits<double>::infinity();
}

std::vector<double> MessagePosterior::probs() const {
    const double mx = *std::max_element(log_weights_.begin(), log_weights_.end());
    std::vector<double> out(log_weights_.size());
    double total = 0.0;
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = std::exp(log_weights_[m] - mx);
        total += out[m];
    }
    for (double& p : out) p /= total;
    return out;
}

double MessagePosterior::prob(std::size_t m) const {
    const double mx = *std::max_element(log_weights_.begin(), log_weights_.end());
    double total = 0.0;
    for (double lw : log_weights_) total += std::exp(lw - mx);
    return std::exp(log_weights_[m] - mx) / total;
}

std::size_t MessagePosterior::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(log_weights_.begin(), log_weights_.end()) - log_weights_.begin());
}

void MessagePosterior::rescale() {
    const double mx = *std::max_element(log_weights_.begin(), log_weights_.end());
    if (std::isfinite(mx) && mx != 0.0)
        for (double& lw : log_weights_) lw -= mx;
}

std::vector<double> effective_symbol_prior(const MessagePosterior& mp, const Codebook& cb,
                                           std::size_t i) {
    if (i >= cb.block_length) throw std::invalid_argument("effective_symbol_prior: position out of range");
    const std::vector<double> p = mp.probs();
    std::vector<double> out(cb.alphabet.size(), 0.0);
    const std::uint16_t* col = cb.table.data() + i * cb.message_count;
    for (std::size_t m = 0; m < cb.message_count; ++m) out[col[m]] += p[m];
    double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& v : out) v /= total;
    return out;
}

MessagePosterior update_message_posterior(const MessagePosterior& mp, const Codebook& cb,
                                          std::size_t i, const std::vector<double>& prior_x,
                                          const std::vector<double>& posterior_x) {
    if (prior_x.size() != cb.alphabet.size() || posterior_x.size() != cb.alphabet.size())
        throw std::invalid_argument("update_message_posterior: distribution sizes differ from alphabet");
    MessagePosterior out = mp;
    const std::uint16_t* col = cb.table.data() + i * cb.message_count;
    std::vector<double> log_ratio(cb.alphabet.size());
    for (std::size_t x = 0; x < cb.alphabet.size(); ++x) {
        if (prior_x[x] > 0.0)
            log_ratio[x] = std::log(posterior_x[x]) - std::log(prior_x[x]);
        else
            log_ratio[x] = std::numeric_limits<double>::quiet_NaN();  // flagged below
    }
    for (std::size_t m = 0; m < cb.message_count; ++m) {
        const double r = log_ratio[col[m]];
        if (std::isnan(r)) {
            if (mp.prob(m) > 0.0)
                throw std::invalid_argument("update_message_posterior: message mass on a zero-prior symbol");
            continue;  // already at zero, stays there
        }
        out.add_log_weight(m, r);
    }
    out.rescale();
    out.set_symbol_index(mp.symbol_index() + 1);
    return out;
}

Amplitude choose_symbol_control(const std::vector<double>& prior_x,
                                const std::vector<Amplitude>& alphabet, double dt,
                                const SearchConfig& cfg) {
    return optimize_control(alphabet, prior_x, dt, 1.0, cfg);
}

CodedReceptionResult run_coded_reception(const Codebook& cb, std::size_t true_message,
                                         const ControlPolicy& policy, const DetectionParams& params,
                                         Rng& rng, std::optional<MessagePosterior> initial) {
    if (true_message >= cb.message_count)
        throw std::invalid_argument("run_coded_reception: message index out of range");
    const bool zero_policy = std::holds_alternative<ZeroControl>(policy);
    if (!zero_policy && !std::holds_alternative<PerSymbolMI>(policy))
        throw std::invalid_argument("run_coded_reception: policy must be Zero or PerSymbolMI");

    SearchConfig cfg = zero_policy ? SearchConfig{} : std::get<PerSymbolMI>(policy).search;
    if (params.l_max > 0.0) cfg.l_max = params.l_max;

    MessagePosterior mp = initial ? std::move(*initial) : MessagePosterior(cb.message_count);
    if (mp.size() != cb.message_count)
        throw std::invalid_argument("run_coded_reception: initial posterior size mismatch");

    constexpr double dt = 1.0;  // amplitudes are in per-symbol photon units
    CodedReceptionResult res;
    res.trace.reserve(cb.block_length);

    std::vector<double> posterior_x(cb.alphabet.size());
    for (std::size_t i = 0; i < cb.block_length; ++i) {
        const std::vector<double> prior_x = effective_symbol_prior(mp, cb, i);
        const Amplitude l =
            zero_policy ? Amplitude{0.0, 0.0} : choose_symbol_control(prior_x, cb.alphabet, dt, cfg);

        const std::uint16_t x_true = cb.symbol(true_message, i);
        const double p_true = slice_click_probability(cb.alphabet[x_true], l, dt);
        const int clicked = sample_slice(p_true, rng);

        double total = 0.0;
        for (std::size_t x = 0; x < cb.alphabet.size(); ++x) {
            const double pc = slice_click_probability(cb.alphabet[x], l, dt);
            posterior_x[x] = prior_x[x] * (clicked ? pc : 1.0 - pc);
            total += posterior_x[x];
        }
        if (total <= 0.0) throw ImpossibleObservation{};
        for (double& v : posterior_x) v /= total;

        SymbolStep step;
        step.control = l;
        step.clicked = clicked;
        step.info_density = std::log(posterior_x[x_true]) - std::log(prior_x[x_true]);
        res.trace.push_back(step);

        mp = update_message_posterior(mp, cb, i, prior_x, posterior_x);
    }
    res.decoded = mp.argmax();
    res.final_message_probs = mp.probs();
    return res;
}

}  // namespace optrx
