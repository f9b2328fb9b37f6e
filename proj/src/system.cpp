#include "smoothrl/system.hpp"

#include "smoothrl/errors.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <cstdint>
#include <stdexcept>

namespace smoothrl {

void DynamicalSystem::validate() const {
    if (dimension() > 0 && !rhs) throw InvalidParameters("system '" + name + "': states declared without rhs");
    if (output_count() > 0 && !output) throw InvalidParameters("system '" + name + "': outputs declared without map");
    if (is_hybrid() && !update) {
        throw InvalidParameters("system '" + name + "': discrete states declared without update");
    }
}

Vector DynamicalSystem::derivative(double t, std::span<const double> x, std::span<const double> z,
                                   std::span<const double> u) const {
    Vector dx(dimension(), 0.0);
    if (rhs) rhs(t, x, z, u, dx);
    return dx;
}

Vector DynamicalSystem::outputs(double t, std::span<const double> x, std::span<const double> z,
                                std::span<const double> u) const {
    Vector y(output_count(), 0.0);
    if (output) output(t, x, z, u, y);
    return y;
}

namespace {

std::size_t find_name(const std::vector<std::string>& names, const std::string& name, const char* what) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range(std::string("no ") + what + " named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

std::pair<std::string, std::string> split_port(const std::string& qualified) {
    const auto dot = qualified.find('.');
    if (dot == std::string::npos) return {{}, qualified};
    return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

struct BlockPlan {
    DynamicalSystem sys;
    std::size_t x_offset = 0;
    std::size_t z_offset = 0;
    std::size_t y_offset = 0;              // into the signal buffer
    std::vector<std::size_t> input_source; // signal buffer index per block input
};

// Signal buffer layout: [external inputs..., block outputs in declared order...].
struct Plan {
    std::vector<BlockPlan> blocks;
    std::vector<std::size_t> eval_order;
    std::size_t n_external = 0;
    std::size_t n_signals = 0;
    std::size_t n_states = 0;
    std::size_t n_discrete = 0;

    void gather(const BlockPlan& b, const Vector& signals, Vector& u) const {
        u.resize(b.input_source.size());
        for (std::size_t k = 0; k < u.size(); ++k) u[k] = signals[b.input_source[k]];
    }

    void evaluate_signals(double t, std::span<const double> x, std::span<const double> z, std::span<const double> u,
                          Vector& signals) const {
        signals.assign(n_signals, 0.0);
        std::copy(u.begin(), u.end(), signals.begin());
        Vector bu;
        for (std::size_t idx : eval_order) {
            const auto& b = blocks[idx];
            if (b.sys.output_count() == 0) continue;
            gather(b, signals, bu);
            b.sys.output(t, x.subspan(b.x_offset, b.sys.dimension()), z.subspan(b.z_offset, b.sys.discrete_dimension()),
                         bu, std::span<double>(signals).subspan(b.y_offset, b.sys.output_count()));
        }
    }
};

// Feedthrough blocks must be evaluated after their sources; a cycle among
// them has no state to break it.
std::vector<std::size_t> evaluation_order(const Plan& plan, const std::vector<std::size_t>& signal_owner) {
    const std::size_t n = plan.blocks.size();
    std::vector<int> mark(n, 0); // 0 new, 1 on stack, 2 done
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!plan.blocks[i].sys.feedthrough) {
            order.push_back(i);
            mark[i] = 2;
        }
    }
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (mark[i] == 2) return;
        mark[i] = 1;
        const auto& b = plan.blocks[i];
        for (std::size_t k = 0; k < b.input_source.size(); ++k) {
            const std::size_t src = b.input_source[k];
            if (src < plan.n_external) continue;
            const std::size_t owner = signal_owner[src];
            if (mark[owner] == 1) {
                const std::string signal = b.sys.name + "." + b.sys.input_names[k];
                throw CompositionError("algebraic loop through signal '" + signal + "'", signal);
            }
            visit(owner);
        }
        mark[i] = 2;
        order.push_back(i);
    };
    for (std::size_t i = 0; i < n; ++i) visit(i);
    return order;
}

} // namespace

std::size_t DynamicalSystem::output_index(const std::string& n) const { return find_name(output_names, n, "output"); }
std::size_t DynamicalSystem::state_index(const std::string& n) const { return find_name(state_names, n, "state"); }
std::size_t DynamicalSystem::input_index(const std::string& n) const { return find_name(input_names, n, "input"); }

DynamicalSystem compose(std::string name, std::vector<DynamicalSystem> blocks, const Wiring& wiring) {
    auto plan = std::make_shared<Plan>();
    plan->n_external = wiring.external_inputs.size();

    std::map<std::string, std::size_t> block_index;
    std::map<std::string, std::size_t> signal_index;
    for (std::size_t e = 0; e < wiring.external_inputs.size(); ++e) {
        if (!signal_index.emplace(wiring.external_inputs[e], e).second) {
            throw CompositionError("duplicate external input '" + wiring.external_inputs[e] + "'",
                                   wiring.external_inputs[e]);
        }
    }

    DynamicalSystem out;
    out.name = std::move(name);
    out.input_names = wiring.external_inputs;

    std::size_t n_signals = plan->n_external;
    std::vector<std::size_t> signal_owner(n_signals, 0);
    for (auto& sys : blocks) {
        sys.validate();
        if (sys.name.empty() || sys.name.find('.') != std::string::npos) {
            throw CompositionError("block name '" + sys.name + "' must be non-empty and contain no '.'", sys.name);
        }
        if (!block_index.emplace(sys.name, plan->blocks.size()).second) {
            throw CompositionError("duplicate block name '" + sys.name + "'", sys.name);
        }
        BlockPlan b;
        b.x_offset = plan->n_states;
        b.z_offset = plan->n_discrete;
        b.y_offset = n_signals;
        b.input_source.assign(sys.input_count(), SIZE_MAX);
        for (const auto& s : sys.state_names) out.state_names.push_back(sys.name + "." + s);
        for (const auto& s : sys.discrete_names) out.discrete_names.push_back(sys.name + "." + s);
        for (const auto& s : sys.output_names) {
            out.output_names.push_back(sys.name + "." + s);
            signal_index.emplace(sys.name + "." + s, n_signals++);
            signal_owner.push_back(plan->blocks.size());
        }
        plan->n_states += sys.dimension();
        plan->n_discrete += sys.discrete_dimension();
        b.sys = std::move(sys);
        plan->blocks.push_back(std::move(b));
    }
    plan->n_signals = n_signals;

    for (const auto& c : wiring.connections) {
        const auto [block, port] = split_port(c.to);
        const auto bi = block_index.find(block);
        if (bi == block_index.end()) throw CompositionError("unresolved signal '" + c.to + "': no such block", c.to);
        auto& b = plan->blocks[bi->second];
        const auto pi = std::find(b.sys.input_names.begin(), b.sys.input_names.end(), port);
        if (pi == b.sys.input_names.end()) {
            throw CompositionError("unresolved signal '" + c.to + "': no such block input", c.to);
        }
        const auto k = static_cast<std::size_t>(pi - b.sys.input_names.begin());
        if (b.input_source[k] != SIZE_MAX) throw CompositionError("signal '" + c.to + "' wired twice", c.to);
        const auto si = signal_index.find(c.from);
        if (si == signal_index.end()) throw CompositionError("unresolved signal '" + c.from + "'", c.from);
        b.input_source[k] = si->second;
    }
    for (const auto& b : plan->blocks) {
        for (std::size_t k = 0; k < b.input_source.size(); ++k) {
            if (b.input_source[k] == SIZE_MAX) {
                const std::string signal = b.sys.name + "." + b.sys.input_names[k];
                throw CompositionError("unresolved signal '" + signal + "': input not wired", signal);
            }
        }
    }

    plan->eval_order = evaluation_order(*plan, signal_owner);
    out.feedthrough = std::any_of(plan->blocks.begin(), plan->blocks.end(), [](const BlockPlan& b) {
        return b.sys.feedthrough;
    }) || plan->n_external > 0;

    std::shared_ptr<const Plan> cplan = plan;
    if (plan->n_states > 0) {
        out.rhs = [cplan](double t, std::span<const double> x, std::span<const double> z, std::span<const double> u,
                          std::span<double> dx) {
            Vector signals, bu;
            cplan->evaluate_signals(t, x, z, u, signals);
            for (const auto& b : cplan->blocks) {
                if (b.sys.dimension() == 0) continue;
                cplan->gather(b, signals, bu);
                b.sys.rhs(t, x.subspan(b.x_offset, b.sys.dimension()), z.subspan(b.z_offset, b.sys.discrete_dimension()),
                          bu, dx.subspan(b.x_offset, b.sys.dimension()));
            }
        };
    }
    if (!out.output_names.empty()) {
        out.output = [cplan](double t, std::span<const double> x, std::span<const double> z, std::span<const double> u,
                             std::span<double> y) {
            Vector signals;
            cplan->evaluate_signals(t, x, z, u, signals);
            std::copy(signals.begin() + static_cast<std::ptrdiff_t>(cplan->n_external), signals.end(), y.begin());
        };
    }
    if (plan->n_discrete > 0) {
        out.update = [cplan](double t, std::span<const double> x, std::span<const double> z, std::span<const double> u,
                             double h, std::span<double> z_next) {
            Vector signals, bu;
            cplan->evaluate_signals(t, x, z, u, signals);
            std::copy(z.begin(), z.end(), z_next.begin());
            for (const auto& b : cplan->blocks) {
                if (b.sys.discrete_dimension() == 0) continue;
                cplan->gather(b, signals, bu);
                b.sys.update(t, x.subspan(b.x_offset, b.sys.dimension()), z.subspan(b.z_offset, b.sys.discrete_dimension()),
                             bu, h, z_next.subspan(b.z_offset, b.sys.discrete_dimension()));
            }
        };
    }
    return out;
}

} // namespace smoothrl
