#include "srpsim/adversary/fuzz.hpp"

#include "srpsim/errors.hpp"

#include <random>

namespace srpsim::adversary {

namespace {

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(below(static_cast<int>(v.size())))]; }

private:
    std::mt19937_64 rng_;
};

Action random_action(Draw& r, AdversaryClass cls, const FuzzBounds& b) {
    static const std::vector<ActionKind> common = {
        ActionKind::drop,      ActionKind::forward,     ActionKind::append_self,      ActionKind::edit,
        ActionKind::edit,      ActionKind::bcast,       ActionKind::send_to,          ActionKind::send_source,
        ActionKind::send_predecessor, ActionKind::store, ActionKind::replay,          ActionKind::forge_rrep,
        ActionKind::wait,      ActionKind::restore,     ActionKind::forward,
    };
    Action a;
    a.kind = common[static_cast<std::size_t>(r.below(static_cast<int>(common.size())))];
    if (cls == AdversaryClass::arbitrary && r.chance(0.08)) a.kind = ActionKind::tunnel_send;
    switch (a.kind) {
        case ActionKind::edit: {
            static const std::vector<Field> fields = {Field::node_list, Field::route, Field::metric_list, Field::qid};
            static const std::vector<EditOp> ops = {EditOp::append, EditOp::insert,  EditOp::remove, EditOp::remove_node,
                                                    EditOp::replace, EditOp::add,     EditOp::set};
            a.edit.field = r.pick(fields);
            a.edit.op = r.pick(ops);
            a.edit.index = r.below(7) - 3;
            a.edit.node = r.pick(b.nodes);
            a.edit.value = qos::to_fixed(r.real(-b.max_value, b.max_value));
            break;
        }
        case ActionKind::send_to: a.peer = r.pick(b.nodes); break;
        case ActionKind::tunnel_send: {
            a.peer = r.pick(b.nodes);
            const int hops = r.below(3);
            for (int i = 0; i < hops; ++i) a.path.push_back(r.pick(b.nodes));
            break;
        }
        case ActionKind::forge_rrep: {
            const int tail = r.below(3);
            for (int i = 0; i < tail; ++i) a.fake_tail.push_back(r.pick(b.nodes));
            a.include_self = r.chance(0.5);
            break;
        }
        case ActionKind::replay: a.rewrite_qid = r.chance(0.5); break;
        case ActionKind::wait: a.delay = r.real(0, b.max_wait); break;
        default: break;
    }
    return a;
}

}  // namespace

AttackScript fuzz_script(std::uint64_t seed, AdversaryClass cls, const FuzzBounds& b) {
    if (b.nodes.empty()) throw InvalidArgument("fuzz bounds need at least one node");
    Draw r(seed);
    AttackScript s;
    s.name = "fuzz";
    s.budget = 8 + r.below(40);
    if (r.chance(0.3)) s.bias = qos::to_fixed(r.real(-b.max_value, b.max_value));
    if (cls == AdversaryClass::arbitrary) s.skip_checks = r.chance(0.5);
    std::vector<Trigger> triggers = {Trigger::rreq, Trigger::rreq, Trigger::rrep, Trigger::rrep, Trigger::overheard,
                                     Trigger::at_time};
    if (cls == AdversaryClass::arbitrary) {
        triggers.push_back(Trigger::tunnel_rreq);
        triggers.push_back(Trigger::tunnel_rrep);
    }
    const int rules = 1 + r.below(b.max_rules);
    for (int i = 0; i < rules; ++i) {
        Rule rule;
        rule.trigger = r.pick(triggers);
        if (rule.trigger == Trigger::at_time) rule.at = r.real(0, b.max_at);
        if (r.chance(0.2)) rule.filter.from = r.pick(b.nodes);
        if (r.chance(0.1)) rule.filter.min_len = r.below(3);
        rule.once_per_query = r.chance(0.8);
        const int n = 1 + r.below(b.max_actions);
        for (int k = 0; k < n; ++k) rule.actions.push_back(random_action(r, cls, b));
        s.rules.push_back(std::move(rule));
    }
    validate(s, cls);
    return s;
}

}  // namespace srpsim::adversary
