#pragma once

// Simulation configuration: a versioned JSON document with sections
// coefficients / reaction / grid / initial / time / output. Parsing is
// strict (unknown or missing keys are errors naming the key) and validating
// (inadmissible coefficient or kinetic parameters are rejected carrying the
// failing ConditionReport).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "crossdiff/coeffs.hpp"
#include "crossdiff/conditions.hpp"
#include "crossdiff/reactions.hpp"
#include "crossdiff/solver.hpp"

namespace crossdiff {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg,
                         std::optional<ConditionReport> rep = std::nullopt)
        : std::runtime_error(msg), report(std::move(rep)) {}

    /// Attached when the rejection came from an admissibility check.
    std::optional<ConditionReport> report;
};

/// Diffusion parameters of the population model (the kinetic b-parameters
/// live in the reaction section).
struct SktCoefficients {
    double a10{}, a11{}, a12{};
    double a20{}, a21{}, a22{};
};

using CoefficientInput = std::variant<SktCoefficients, CoeffSet>;

enum class InitialProfile { Constant, CosinePerturbation, Step, TwoBump, Random };

struct InitialConfig {
    InitialProfile profile{InitialProfile::Constant};
    Vec2 base{0.25, 0.25};      ///< constant / cosine-perturbation / two-bump / random
    Vec2 amplitude{0.0, 0.0};   ///< cosine-perturbation / two-bump / random
    Eigen::Vector2i modes{1, 1}; ///< cosine-perturbation: cos(modes_i pi x / L)
    Vec2 left{0.0, 0.0};        ///< step
    Vec2 right{0.0, 0.0};       ///< step
    double interface_pos{0.5};  ///< step: jump at x = interface_pos * L
    Vec2 centers{0.3, 0.7};     ///< two-bump: bump centers (fractions of L)
    double width{0.08};         ///< two-bump: bump width (fraction of L)
    int max_modes{6};           ///< random: number of Fourier modes
    bool rescale{true};
};

struct OutputConfig {
    std::string directory; ///< empty: resolved by the CLI (flag, env var, default)
    int cadence{1};        ///< write every cadence-th diagnostics row
    bool plots{true};
};

struct SimConfig {
    int schema_version{1};
    CoefficientInput coefficients{SktCoefficients{}};
    std::variant<NoReaction, LotkaVolterra> reaction{NoReaction{}};
    Grid1D grid{64, 1.0};
    InitialConfig initial{};
    double tau{};
    double t_end{};
    OutputConfig output{};
    std::uint64_t seed{0};
};

/// Parse and fully validate a config document. Throws ConfigError on schema
/// violations (message names the offending key) and on admissibility failures
/// (report attached): SKT inputs must pass check_skt_corollary, explicit
/// matrices must pass check_symmetry plus one of the theorem/remark criteria,
/// kinetic parameters must pass lv_band, and the initial profile must land in
/// the closure of D on the configured grid.
SimConfig parse_config(const std::string& document);

/// Canonical JSON text; parse_config(serialize(c)) reproduces c exactly.
std::string serialize(const SimConfig& cfg);

/// Resolve the coefficient input to the matrix family (via from_skt for SKT).
CoeffSet config_coeffs(const SimConfig& cfg);

/// The SKT parameter block assembled for check_skt_corollary: a-parameters
/// from the coefficients section, b-parameters from the reaction (zeros when
/// the reaction is none). Empty when coefficients are an explicit matrix.
std::optional<SktParams> config_skt_params(const SimConfig& cfg);

ReactionSpec config_reaction(const SimConfig& cfg);

/// Evaluate the initial profile at cell centers (deterministic in cfg.seed
/// for the random preset).
Field2 eval_initial_profile(const SimConfig& cfg);

RunSetup to_run_setup(const SimConfig& cfg);

/// Full time loop on a validated config.
RunResult run(const SimConfig& cfg);

/// Coefficient-only document loader for the `check`/`verify` subcommands:
/// accepts a full config, a bare {"coefficients": ...} object, or the
/// {"skt": ...} / {"matrix": ...} / raw {"alpha","beta","gamma"} forms.
/// Performs no admissibility checks (reporting failures is the caller's job).
struct CoeffDocument {
    CoeffSet coeffs;
    std::optional<SktParams> skt; ///< set when the document used SKT form
};
CoeffDocument load_coeff_document(const std::string& document);

} // namespace crossdiff
