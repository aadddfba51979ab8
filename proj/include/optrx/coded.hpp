#ifndef OPTRX_CODED_HPP
#define OPTRX_CODED_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "optrx/core.hpp"
#include "optrx/rng.hpp"

namespace optrx {

// Constant-composition random codebook: every position's column is a random
// permutation of one fixed integer composition of the design distribution, so
// the per-position empirical symbol frequencies match it exactly.
// Symbol amplitudes are in per-symbol photon units: the click probability of
// symbol x under control l over one symbol period is 1 - e^{-|x + l|^2}.
struct Codebook {
    std::size_t message_count = 0;  // M
    std::size_t block_length = 0;   // N
    std::vector<Amplitude> alphabet;
    std::vector<double> design_dist;
    std::vector<std::uint32_t> composition;  // per-column symbol counts, sums to M
    std::vector<std::uint16_t> table;        // position-major: table[i * M + m] = alphabet index

    std::uint16_t symbol(std::size_t message, std::size_t position) const {
        return table[position * message_count + message];
    }
    // Mean photon number of the empirical symbol distribution.
    double mean_photon_number() const;
};

inline constexpr std::size_t kMaxMessages = 1u << 16;
inline constexpr std::size_t kMaxBlockLength = 1u << 14;

// Builds the codebook; throws when the integer composition would drop a
// required symbol (M * P_X(x) rounds to 0 for some x with P_X(x) > 0).
Codebook build_codebook(std::size_t message_count, std::size_t block_length,
                        std::vector<Amplitude> alphabet, std::vector<double> design_dist, Rng& rng);

// Posterior over messages, kept in the log domain so that N scaled updates do
// not underflow.
class MessagePosterior {
public:
    explicit MessagePosterior(std::size_t message_count);            // uniform
    explicit MessagePosterior(const std::vector<double>& probs);     // validated

    std::size_t size() const { return log_weights_.size(); }
    std::size_t symbol_index() const { return symbol_index_; }
    void set_symbol_index(std::size_t i) { symbol_index_ = i; }

    std::vector<double> probs() const;       // normalized, linear domain
    double prob(std::size_t m) const;        // normalized single entry
    std::size_t argmax() const;              // ties to the lowest index
    void add_log_weight(std::size_t m, double delta) { log_weights_[m] += delta; }
    void rescale();                          // subtract max log weight

private:
    std::vector<double> log_weights_;
    std::size_t symbol_index_ = 0;
};

// Effective prior over the alphabet at position i:
// P'_X(x) = sum over messages m with f_i(m) = x of the message posterior.
std::vector<double> effective_symbol_prior(const MessagePosterior& mp, const Codebook& cb,
                                           std::size_t i);

// Scaled message update P(m) <- P(m) * P''_X(f_i(m)) / P'_X(f_i(m)),
// renormalized. Throws when a message with mass sits on a zero-prior symbol.
MessagePosterior update_message_posterior(const MessagePosterior& mp, const Codebook& cb,
                                          std::size_t i, const std::vector<double>& prior_x,
                                          const std::vector<double>& posterior_x);

// MI-maximizing constant-per-symbol control for the alphabet channel; the
// alpha = 1 incremental objective applied to the alphabet ensemble.
Amplitude choose_symbol_control(const std::vector<double>& prior_x,
                                const std::vector<Amplitude>& alphabet, double dt,
                                const SearchConfig& cfg);

struct SymbolStep {
    Amplitude control;
    int clicked = 0;
    double info_density = 0.0;  // log P''_X(x_true) / P'_X(x_true)
};

struct CodedReceptionResult {
    std::size_t decoded = 0;
    std::vector<SymbolStep> trace;
    std::vector<double> final_message_probs;
};

// One full codeword reception: per symbol, form the effective prior, pick the
// control (Zero or PerSymbolMI), observe one binary outcome, Bayes-update the
// symbol posterior and rescale the message posterior. Decodes by MAP at the
// final position. An optional non-uniform initial message posterior is mainly
// for exercising error paths.
CodedReceptionResult run_coded_reception(const Codebook& cb, std::size_t true_message,
                                         const ControlPolicy& policy, const DetectionParams& params,
                                         Rng& rng,
                                         std::optional<MessagePosterior> initial = std::nullopt);

}  // namespace optrx

#endif
