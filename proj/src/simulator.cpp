#include "secstate/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "secstate/errors.hpp"

namespace secstate {

namespace {

[[noreturn]] void unknown_target(const std::string& message) { throw Error(ErrorCode::UnknownTarget, message); }

EntryPoint& target_entry_point(NetworkFunction& nf, const Event& ev) {
    if (ev.target.entry_point.empty()) {
        unknown_target(std::string(to_string(ev.kind)) + " on '" + nf.id + "' needs an entry point target");
    }
    auto* ep = nf.find_entry_point(ev.target.entry_point);
    if (ep == nullptr) unknown_target("no entry point '" + ev.target.entry_point + "' on '" + nf.id + "'");
    return *ep;
}

RadioMagnitude& radio_of(EntryPoint& ep) {
    auto* radio = std::get_if<RadioMagnitude>(&ep.om_context);
    if (radio == nullptr) {
        throw Error(ErrorCode::ValidationError, "entry point '" + ep.ep_id + "' has no radio UE counters");
    }
    return *radio;
}

void add_entry_point(NetworkFunction& nf, const EntryPoint& ep) {
    if (static_cast<std::int64_t>(nf.entry_points.size()) >= nf.ep_max) {
        throw Error(ErrorCode::CapacityExceeded, "'" + nf.id + "' already has ep_max=" +
                                                     std::to_string(nf.ep_max) + " entry points");
    }
    if (nf.find_entry_point(ep.ep_id) != nullptr) {
        throw Error(ErrorCode::ValidationError, "entry point '" + ep.ep_id + "' already exists on '" + nf.id + "'");
    }
    validate_entry_point(ep, "entry point '" + ep.ep_id + "'");
    nf.entry_points.push_back(ep);
}

void set_exposed(EntryPoint& ep, std::int64_t exposed) {
    if (exposed < 0 || exposed > ep.data_items_total) {
        throw Error(ErrorCode::ValidationError, "data_items_exposed " + std::to_string(exposed) +
                                                    " outside [0, " + std::to_string(ep.data_items_total) +
                                                    "] on '" + ep.ep_id + "'");
    }
    ep.data_items_exposed = exposed;
}

template <typename F>
void for_bound_penalties(NetworkFunction& nf, const std::string& cell, F&& f) {
    for (auto& req : nf.control_sets) {
        for (auto& slot : req.controls) {
            if (slot.context && slot.context->cell == cell) f(*slot.context);
        }
    }
}

void apply_ue_change(NetworkFunction& nf, const Event& ev, const UeChange& change) {
    auto& ep = target_entry_point(nf, ev);
    auto& radio = radio_of(ep);
    if (ev.kind == EventKind::UEAttached) {
        for_bound_penalties(nf, ep.ep_id, [&](PenaltyContext& p) {
            if (p.ue_connected + change.count > p.ue_capacity) {
                throw Error(ErrorCode::CapacityExceeded, "cell '" + ep.ep_id + "' would exceed UE capacity " +
                                                             std::to_string(p.ue_capacity));
            }
            p.ue_connected += change.count;
        });
        radio.ue_connected += change.count;
        if (change.potential_attacker) radio.ue_potential_attackers += change.count;
        return;
    }
    if (change.count > radio.ue_connected ||
        (change.potential_attacker && change.count > radio.ue_potential_attackers)) {
        throw Error(ErrorCode::ValidationError, "more UEs detach than are connected on '" + ep.ep_id + "'");
    }
    radio.ue_connected -= change.count;
    if (change.potential_attacker) radio.ue_potential_attackers -= change.count;
    radio.ue_potential_attackers = std::min(radio.ue_potential_attackers, radio.ue_connected);
    for_bound_penalties(nf, ep.ep_id, [&](PenaltyContext& p) {
        p.ue_connected = std::max<std::int64_t>(0, p.ue_connected - change.count);
    });
}

void apply_control_change(NetworkFunction& nf, const ControlChange& change) {
    if (!change.patch_rule.empty()) {
        auto* rule = nf.find_rule(change.patch_rule);
        if (rule == nullptr) unknown_target("no rule '" + change.patch_rule + "' on '" + nf.id + "'");
        rule->noncompliant_attributes = 0;
        rule->compliant = true;
        rule->nc_timer = 0.0;
    }
    if (change.requirement_id.empty()) return;
    auto req = std::find_if(nf.control_sets.begin(), nf.control_sets.end(),
                            [&](const ControlRequirement& r) { return r.requirement_id == change.requirement_id; });
    if (req == nf.control_sets.end()) {
        unknown_target("no requirement '" + change.requirement_id + "' on '" + nf.id + "'");
    }
    auto slot = std::find_if(req->controls.begin(), req->controls.end(),
                             [&](const ControlSlot& s) { return s.name == change.control; });
    if (slot == req->controls.end()) {
        unknown_target("no control '" + change.control + "' in '" + change.requirement_id + "'");
    }
    slot->implemented = change.implemented;
    if (change.correctness) {
        if (!(*change.correctness >= 0.0 && *change.correctness <= 1.0)) {
            throw Error(ErrorCode::ValidationError, "control correctness outside [0,1]");
        }
        slot->correctness = *change.correctness;
    }
    if (change.null_scheme_preferred && slot->context) {
        slot->context->null_scheme_preferred = *change.null_scheme_preferred;
    }
}

json record(std::string_view type, SimTime time) { return {{"type", type}, {"time", time}}; }

json merged(json base, const json& body) {
    for (auto it = body.begin(); it != body.end(); ++it) base[it.key()] = it.value();
    return base;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_document(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
    }
}

std::vector<Event> events_from_json(const json& doc, const Network& net) {
    std::vector<Event> events;
    auto it = doc.find("events");
    if (it == doc.end()) return events;
    if (!it->is_array()) throw Error(ErrorCode::ValidationError, "/events: expected an array");
    bool explicit_ids = false;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string path = "/events/" + std::to_string(i);
        Event ev = event_from_json((*it)[i], path);
        if (ev.kind == EventKind::ScanTick) {
            throw Error(ErrorCode::ValidationError, path + ": scan ticks are generated by the clock");
        }
        if (!net.has_nf(ev.target.nf)) {
            throw Error(ErrorCode::ValidationError, path + "/target: unknown network function '" + ev.target.nf + "'");
        }
        if (i == 0) explicit_ids = ev.id != 0;
        if ((ev.id != 0) != explicit_ids) {
            throw Error(ErrorCode::ValidationError, path + "/id: either every event carries an id or none does");
        }
        if (!explicit_ids) ev.id = i + 1;
        if (!events.empty() && ev.time < events.back().time) {
            throw Error(ErrorCode::ValidationError, path + "/time: events must be sorted by time");
        }
        events.push_back(std::move(ev));
    }
    std::set<EventId> ids;
    for (const auto& ev : events) {
        if (!ids.insert(ev.id).second) {
            throw Error(ErrorCode::ValidationError, "/events: duplicate event id " + std::to_string(ev.id));
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.time != b.time ? a.time < b.time : a.id < b.id;
    });
    return events;
}

} // namespace

void SimConfig::validate() const {
    scan.validate();
    weights.validate();
    if (!(tau_eff >= 0.0 && tau_eff <= 1.0)) throw Error(ErrorCode::ValidationError, "tau_eff outside [0,1]");
}

json to_json(const SimConfig& cfg) {
    return {{"scan_period", cfg.scan.scan_period},
            {"time_to_patch_limit", cfg.scan.time_to_patch_limit},
            {"tau_eff", cfg.tau_eff},
            {"weights", to_json(cfg.weights)}};
}

SimConfig sim_config_from_json(const json& j, SimConfig base) {
    try {
        base.scan.scan_period = j.value("scan_period", base.scan.scan_period);
        base.scan.time_to_patch_limit = j.value("time_to_patch_limit", base.scan.time_to_patch_limit);
        base.tau_eff = j.value("tau_eff", base.tau_eff);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ValidationError, std::string("/config: ") + e.what());
    }
    if (j.contains("weights")) base.weights = weights_from_json(j.at("weights"));
    base.validate();
    return base;
}

Scenario load_scenario(const json& document) {
    Scenario s;
    s.network = load_topology(document);
    s.events = events_from_json(document, s.network);
    if (auto it = document.find("config"); it != document.end()) s.config = sim_config_from_json(*it);
    s.config.validate();
    if (auto it = document.find("intents"); it != document.end()) {
        for (const auto& j : *it) {
            Intent intent = intent_from_json(j);
            decompose_intent(intent, s.network);  // scope must resolve
            s.intents.push_back(std::move(intent));
        }
    }
    s.seed = document.value("seed", std::uint64_t{0});
    return s;
}

Scenario load_scenario_text(std::string_view text) { return load_scenario(parse_document(text)); }

Scenario load_scenario_file(const std::string& path) {
    try {
        const std::string text = read_file(path);
        return load_scenario_text(text);
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + std::string(e.what()));
    }
}

json serialize(const Scenario& scenario) {
    json doc = serialize(scenario.network);
    json events = json::array();
    for (const auto& ev : scenario.events) events.push_back(to_json(ev));
    json intents = json::array();
    for (const auto& i : scenario.intents) intents.push_back(to_json(i));
    doc["events"] = std::move(events);
    doc["intents"] = std::move(intents);
    doc["config"] = to_json(scenario.config);
    doc["seed"] = scenario.seed;
    return doc;
}

std::vector<std::string> validate_scenario_text(std::string_view text) {
    Scenario s;
    try {
        s = load_scenario_text(text);
    } catch (const Error& e) {
        return {e.what()};
    }
    std::vector<std::string> problems;
    Network net = s.network;
    for (const auto& ev : s.events) {
        try {
            apply_event_in_place(net, ev, s.config.scan);
        } catch (const Error& e) {
            problems.push_back("event " + std::to_string(ev.id) + " (" + std::string(to_string(ev.kind)) +
                               " at t=" + json(ev.time).dump() + "): " + e.what());
        }
    }
    return problems;
}

void apply_event_in_place(Network& net, const Event& ev, const ScanConfig& cfg) {
    if (!net.has_nf(ev.target.nf)) unknown_target("no network function '" + ev.target.nf + "'");
    // Mutate a copy so a failing event leaves the model untouched.
    Network next = net;
    auto& nf = next.nf(ev.target.nf);
    const auto wrong_payload = [&] {
        throw Error(ErrorCode::ValidationError, std::string(to_string(ev.kind)) + ": payload does not match kind");
    };

    switch (ev.kind) {
        case EventKind::UEAttached:
        case EventKind::UEDetached: {
            const auto* p = std::get_if<UeChange>(&ev.payload);
            if (p == nullptr) wrong_payload();
            apply_ue_change(nf, ev, *p);
            break;
        }
        case EventKind::CellAdded: {
            const auto* p = std::get_if<EntryPointAdded>(&ev.payload);
            if (p == nullptr) wrong_payload();
            add_entry_point(nf, p->entry_point);
            break;
        }
        case EventKind::CellRemoved: {
            const auto& ep = target_entry_point(nf, ev);
            const std::string removed = ep.ep_id;
            std::erase_if(nf.entry_points, [&](const EntryPoint& e) { return e.ep_id == removed; });
            for_bound_penalties(nf, removed, [](PenaltyContext& p) {
                p.cell.clear();
                p.ue_connected = 0;
            });
            break;
        }
        case EventKind::ConfigChanged: {
            const auto* p = std::get_if<ConfigChange>(&ev.payload);
            if (p == nullptr) wrong_payload();
            auto* rule = nf.find_rule(p->rule_id);
            if (rule == nullptr) unknown_target("no rule '" + p->rule_id + "' on '" + nf.id + "'");
            if (p->noncompliant_attributes < 0 || p->noncompliant_attributes > rule->total_attributes) {
                throw Error(ErrorCode::ValidationError, "noncompliant_attributes outside [0, total_attributes]");
            }
            rule->noncompliant_attributes = p->noncompliant_attributes;
            rule->compliant = p->noncompliant_attributes == 0;
            if (rule->compliant) rule->nc_timer = 0.0;
            break;
        }
        case EventKind::FeatureAdded: {
            const auto* p = std::get_if<FeatureChange>(&ev.payload);
            if (p == nullptr) wrong_payload();
            if (p->new_entry_point) add_entry_point(nf, *p->new_entry_point);
            if (p->data_items_exposed) set_exposed(target_entry_point(nf, ev), *p->data_items_exposed);
            break;
        }
        case EventKind::TopologyChanged: {
            const auto* p = std::get_if<LinkChange>(&ev.payload);
            if (p == nullptr) wrong_payload();
            for (const auto& [a, b] : p->add) {
                if (!next.has_nf(a) || !next.has_nf(b)) unknown_target("link to unknown network function");
                next.add_link(a, b);
            }
            for (const auto& [a, b] : p->remove) {
                if (!next.has_nf(a) || !next.has_nf(b)) unknown_target("link to unknown network function");
                next.remove_link(a, b);
            }
            break;
        }
        case EventKind::VulnerabilityDetected: {
            const auto* p = std::get_if<VulnerabilityReport>(&ev.payload);
            if (p == nullptr) wrong_payload();
            if (p->data_items_exposed) set_exposed(target_entry_point(nf, ev), *p->data_items_exposed);
            if (!p->vuln_id.empty()) {
                VulnerabilityTag tag{p->vuln_id, p->category, p->exploitable};
                auto it = std::find_if(nf.vulnerabilities.begin(), nf.vulnerabilities.end(),
                                       [&](const VulnerabilityTag& v) { return v.vuln_id == p->vuln_id; });
                if (it == nf.vulnerabilities.end()) {
                    nf.vulnerabilities.push_back(tag);
                } else {
                    *it = tag;
                }
            }
            break;
        }
        case EventKind::AttackDetected: {
            const auto* p = std::get_if<AttackReport>(&ev.payload);
            if (p == nullptr) wrong_payload();
            if (p->potential_attackers) {
                auto& radio = radio_of(target_entry_point(nf, ev));
                if (*p->potential_attackers < 0 || *p->potential_attackers > radio.ue_connected) {
                    throw Error(ErrorCode::ValidationError, "potential attackers exceed connected UEs");
                }
                radio.ue_potential_attackers = *p->potential_attackers;
            }
            break;
        }
        case EventKind::ControlApplied: {
            const auto* p = std::get_if<ControlChange>(&ev.payload);
            if (p == nullptr) wrong_payload();
            apply_control_change(nf, *p);
            break;
        }
        case EventKind::ScanTick:
            update_nc_timers_in_place(nf, cfg);
            break;
    }
    next.validate();
    net = std::move(next);
}

Network apply_event(Network net, const Event& ev, const ScanConfig& cfg) {
    apply_event_in_place(net, ev, cfg);
    return net;
}

std::string record_line(const json& record) { return record.dump(); }

std::uint64_t RunLog::append(json rec) {
    const std::uint64_t seq = last_seq() + 1;
    rec["seq"] = seq;
    records_.push_back(std::move(rec));
    if (observer_) observer_(records_.back());
    return seq;
}

std::string RunLog::to_jsonl() const {
    std::string out;
    for (const auto& r : records_) {
        out += record_line(r);
        out += '\n';
    }
    return out;
}

void RunLog::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ValidationError, "cannot write '" + path + "'");
    out << to_jsonl();
}

RunLog RunLog::from_jsonl(std::string_view text) {
    RunLog log;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        auto line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        try {
            log.records_.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, "run log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

RunLog RunLog::read(const std::string& path) { return from_jsonl(read_file(path)); }

Simulator::Simulator(Scenario scenario, RunLog::Observer observer)
    : network_(std::move(scenario.network)), config_(scenario.config), seed_(scenario.seed) {
    log_.set_observer(std::move(observer));
    config_.validate();
    network_.validate();
    for (auto& ev : scenario.events) {
        next_id_ = std::max(next_id_, ev.id + 1);
        queue_.emplace(QueueKey{ev.time, ev.id}, std::move(ev));
    }
    hierarchy_ = compute_hierarchy(network_, config_.weights, config_.scan, now_);
    for (const auto& s : hierarchy_.locals) fsm_.emplace(s.scope.id, SecurityStateRecord(s.scope.id, s.as_e));

    json load = record("load", now_);
    load["network"] = serialize(network_);
    load["config"] = to_json(config_);
    load["seed"] = seed_;
    log_.append(std::move(load));
    for (auto& intent : scenario.intents) create_intent(std::move(intent));
    log_snapshots({});
}

const SecurityStateRecord& Simulator::fsm(std::string_view nf_id) const {
    auto it = fsm_.find(std::string(nf_id));
    if (it == fsm_.end()) throw Error(ErrorCode::UnknownId, "no network function '" + std::string(nf_id) + "'");
    return it->second;
}

SimTime Simulator::tick_time(std::uint64_t cycle) const {
    return static_cast<double>(cycle) * config_.scan.scan_period;
}

void Simulator::expand_ticks_if_due() {
    if (ticks_outstanding_ > 0) return;
    const SimTime t = tick_time(next_cycle_);
    if (horizon_ && t > *horizon_) return;
    if (!queue_.empty() && queue_.begin()->first.time < t) return;
    for (const auto& f : network_.functions()) {
        Event tick;
        tick.id = next_id_++;
        tick.time = t;
        tick.kind = EventKind::ScanTick;
        tick.target.nf = f.id;
        queue_.emplace(QueueKey{t, tick.id}, std::move(tick));
        ++ticks_outstanding_;
    }
    ++next_cycle_;
}

bool Simulator::has_pending(SimTime horizon) const {
    if (!queue_.empty() && queue_.begin()->first.time <= horizon) return true;
    return tick_time(next_cycle_) <= horizon && !network_.functions().empty();
}

StepResult Simulator::step() {
    expand_ticks_if_due();
    if (queue_.empty() || (horizon_ && queue_.begin()->first.time > *horizon_)) {
        throw Error(ErrorCode::ExhaustedScenario, "no event due at or before the horizon");
    }
    auto node = queue_.extract(queue_.begin());
    Event ev = std::move(node.mapped());
    now_ = std::max(now_, ev.time);
    const bool is_tick = ev.kind == EventKind::ScanTick;
    if (is_tick) --ticks_outstanding_;

    json ev_rec = record("event", now_);
    ev_rec["event"] = to_json(ev);
    log_.append(std::move(ev_rec));

    try {
        apply_event_in_place(network_, ev, config_.scan);
    } catch (const Error& e) {
        json rej = record("rejected", now_);
        rej["event_id"] = ev.id;
        rej["error"] = e.what();
        log_.append(std::move(rej));
        StepResult rejected;
        rejected.rejected = e.what();
        rejected.event = std::move(ev);
        return rejected;
    }

    StepResult result;
    hierarchy_ = compute_hierarchy(network_, config_.weights, config_.scan, now_);
    const auto* local = hierarchy_.find(Scope::local(ev.target.nf));
    auto& rec = fsm_.at(ev.target.nf);
    const Trigger trigger =
        classify_event(ev, *local, rec.current(), rec.baseline_as_e(), ClassifierConfig{config_.tau_eff});
    const auto before = rec.history().size();
    const bool record_self_loop = trigger != Trigger::NoOp && !is_tick;
    auto entry = rec.apply(now_, trigger, ev.id, local->as_e, record_self_loop);
    if (rec.history().size() > before) {
        json tr = merged(record("transition", now_), to_json(entry));
        tr["nf_id"] = ev.target.nf;
        log_.append(std::move(tr));
        result.transition = entry;
    }

    log_snapshots(ev.target.nf);

    if (is_tick && ticks_outstanding_ == 0) {
        last_reports_ = report_cycle(intents_.intents(), network_, hierarchy_);
        for (const auto& r : last_reports_) log_.append(merged(record("report", now_), to_json(r)));
        result.reports = last_reports_;
    }
    result.event = std::move(ev);
    return result;
}

void Simulator::run_until(SimTime until) {
    horizon_ = until;
    while (has_pending(until)) step();
    now_ = std::max(now_, until);
    horizon_.reset();
}

EventId Simulator::inject(Event ev) {
    if (!network_.has_nf(ev.target.nf)) {
        throw Error(ErrorCode::ValidationError, "unknown target network function '" + ev.target.nf + "'");
    }
    if (ev.kind == EventKind::ScanTick) {
        throw Error(ErrorCode::ValidationError, "scan ticks are generated by the clock");
    }
    if (!ev.target.entry_point.empty() &&
        network_.nf(ev.target.nf).find_entry_point(ev.target.entry_point) == nullptr) {
        throw Error(ErrorCode::ValidationError, "unknown target entry point '" + ev.target.entry_point + "'");
    }
    ev.id = next_id_++;
    ev.time = now_;
    const EventId id = ev.id;
    queue_.emplace(QueueKey{ev.time, id}, std::move(ev));
    return id;
}

void Simulator::log_intent(std::string_view action, const Intent& intent) {
    json rec = record("intent", now_);
    rec["action"] = action;
    rec["intent"] = to_json(intent);
    log_.append(std::move(rec));
}

void Simulator::create_intent(Intent intent) {
    decompose_intent(intent, network_);
    intents_.create(intent);
    log_intent("create", intent);
}

void Simulator::update_intent(const Intent& intent) {
    decompose_intent(intent, network_);
    intents_.update(intent);
    log_intent("update", intent);
}

void Simulator::deactivate_intent(std::string_view intent_id) {
    intents_.deactivate(intent_id);
    log_intent("deactivate", *intents_.find(intent_id));
}

void Simulator::log_snapshots(const NfId& target) {
    for (const auto* s : hierarchy_.all()) {
        const std::string key = s->scope.to_string();
        auto it = last_logged_.find(key);
        const bool changed = it == last_logged_.end() || !it->second.same_values(*s);
        const bool is_target = s->scope.level == ScopeLevel::Local && s->scope.id == target;
        if (!changed && !is_target) continue;
        log_.append(merged(record("snapshot", now_), to_json(*s)));
        last_logged_[key] = *s;
    }
}

RunLog run(Scenario scenario, SimTime until) {
    Simulator sim(std::move(scenario));
    sim.run_until(until);
    return sim.log();
}

} // namespace secstate
