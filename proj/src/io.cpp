#include "msckit/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace msckit {

namespace {

struct MessageDecl {
    std::string id;
    std::string from, to;
    bool lost = false;
    std::string payload;
    int line = 0;
};

struct OrderDecl {
    std::string process;
    std::vector<std::string> tokens;
    int line = 0;
};

struct Draft {
    std::vector<std::string> processes;
    std::vector<MessageDecl> messages;
    std::vector<OrderDecl> orders;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

Msc build(const Draft& d) {
    std::map<std::string, ProcId> pid;
    for (std::size_t i = 0; i < d.processes.size(); ++i) {
        if (pid.count(d.processes[i])) throw ParseError("process " + d.processes[i] + " declared twice", 0);
        pid[d.processes[i]] = static_cast<ProcId>(i);
    }
    std::map<std::string, std::size_t> mid;
    for (std::size_t i = 0; i < d.messages.size(); ++i) {
        const auto& m = d.messages[i];
        if (mid.count(m.id)) throw ParseError("message " + m.id + " declared twice", m.line);
        if (!pid.count(m.from)) throw ParseError("unknown process " + m.from, m.line);
        if (!pid.count(m.to)) throw ParseError("unknown process " + m.to, m.line);
        if (m.from == m.to) throw ParseError("self-send " + m.id + " on " + m.from + " is not allowed", m.line);
        mid[m.id] = i;
    }
    std::vector<Event> evs;
    std::vector<std::vector<EventId>> order(d.processes.size());
    std::vector<EventId> send_of(d.messages.size(), -1), recv_of(d.messages.size(), -1);
    for (const auto& o : d.orders) {
        auto pit = pid.find(o.process);
        if (pit == pid.end()) throw ParseError("unknown process " + o.process, o.line);
        for (const auto& tok : o.tokens) {
            if (tok.size() < 2 || (tok[0] != '!' && tok[0] != '?'))
                throw ParseError("bad event token '" + tok + "', expected !id or ?id", o.line);
            std::string id = tok.substr(1);
            auto it = mid.find(id);
            if (it == mid.end()) throw ParseError("unknown message " + id, o.line);
            const auto& m = d.messages[it->second];
            bool is_send = tok[0] == '!';
            auto& slot = is_send ? send_of[it->second] : recv_of[it->second];
            if (slot >= 0) throw ParseError("event " + tok + " listed twice", o.line);
            if (!is_send && m.lost) throw ParseError("message " + id + " is lost but has a receive", o.line);
            Event ev;
            ev.id = static_cast<EventId>(evs.size());
            ev.label = Action{is_send ? ActionKind::send : ActionKind::receive, pid[m.from], pid[m.to],
                              m.payload.empty() ? m.id : m.payload};
            ev.message = m.id;
            slot = ev.id;
            order[pit->second].push_back(ev.id);
            evs.push_back(std::move(ev));
        }
    }
    std::vector<std::pair<EventId, EventId>> matching;
    for (std::size_t i = 0; i < d.messages.size(); ++i) {
        const auto& m = d.messages[i];
        if (send_of[i] < 0) throw ParseError("send of message " + m.id + " is not placed on any process", m.line);
        if (!m.lost && recv_of[i] < 0)
            throw ParseError("receive of message " + m.id + " is not placed (mark it lost if unmatched)", m.line);
        if (!m.lost) matching.emplace_back(send_of[i], recv_of[i]);
    }
    try {
        return Msc(d.processes, std::move(evs), std::move(order), std::move(matching));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
}

// message declarations recovered from an Msc, in send-id order
std::vector<MessageDecl> messages_of(const Msc& msc) {
    std::vector<MessageDecl> out;
    for (EventId s : msc.sends()) {
        const Action& a = msc.label(s);
        MessageDecl m;
        m.id = msc.event(s).message;
        m.from = msc.processes()[a.sender];
        m.to = msc.processes()[a.receiver];
        m.lost = !msc.matched(s);
        if (a.payload != m.id) m.payload = a.payload;
        out.push_back(m);
    }
    return out;
}

}  // namespace

Msc parse_msc_text(const std::string& text) {
    Draft d;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    bool saw_processes = false;
    while (std::getline(is, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto t = split_ws(raw);
        if (t.empty()) continue;
        if (t[0] == "processes") {
            saw_processes = true;
            d.processes.insert(d.processes.end(), t.begin() + 1, t.end());
        } else if (t[0] == "message") {
            if (t.size() < 4) throw ParseError("expected: message ID FROM TO [lost] [payload X]", lineno);
            MessageDecl m;
            m.id = t[1];
            m.from = t[2];
            m.to = t[3];
            m.line = lineno;
            for (std::size_t i = 4; i < t.size(); ++i) {
                if (t[i] == "lost") {
                    m.lost = true;
                } else if (t[i] == "payload" && i + 1 < t.size()) {
                    m.payload = t[++i];
                } else {
                    throw ParseError("unexpected '" + t[i] + "' in message line", lineno);
                }
            }
            d.messages.push_back(m);
        } else if (t[0] == "order") {
            if (t.size() < 2) throw ParseError("expected: order PROCESS EVENTS...", lineno);
            d.orders.push_back({t[1], std::vector<std::string>(t.begin() + 2, t.end()), lineno});
        } else {
            throw ParseError("unknown directive '" + t[0] + "'", lineno);
        }
    }
    if (!saw_processes && (!d.messages.empty() || !d.orders.empty()))
        throw ParseError("missing 'processes' line", 0);
    return build(d);
}

std::string write_msc_text(const Msc& msc) {
    std::ostringstream os;
    os << "processes";
    for (const auto& p : msc.processes()) os << ' ' << p;
    os << '\n';
    for (const auto& m : messages_of(msc)) {
        os << "message " << m.id << ' ' << m.from << ' ' << m.to;
        if (m.lost) os << " lost";
        if (!m.payload.empty()) os << " payload " << m.payload;
        os << '\n';
    }
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        if (ln.empty()) continue;
        os << "order " << msc.processes()[p];
        for (EventId e : ln) os << ' ' << msc.event_name(e);
        os << '\n';
    }
    return os.str();
}

Msc parse_msc_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
    }
    try {
        Draft d;
        for (const auto& p : j.at("processes")) d.processes.push_back(p.get<std::string>());
        for (const auto& m : j.value("messages", nlohmann::json::array())) {
            MessageDecl md;
            md.id = m.at("id").get<std::string>();
            md.from = m.at("from").get<std::string>();
            md.to = m.at("to").get<std::string>();
            md.lost = m.value("lost", false);
            md.payload = m.value("payload", std::string());
            d.messages.push_back(md);
        }
        const auto& ord = j.value("order", nlohmann::json::object());
        for (auto it = ord.begin(); it != ord.end(); ++it)
            if (std::find(d.processes.begin(), d.processes.end(), it.key()) == d.processes.end())
                throw ParseError("order names unknown process " + it.key(), 0);
        for (const auto& p : d.processes) {
            if (!ord.contains(p)) continue;
            OrderDecl od{p, {}, 0};
            for (const auto& t : ord.at(p)) od.tokens.push_back(t.get<std::string>());
            d.orders.push_back(od);
        }
        return build(d);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad MSC JSON: ") + e.what(), 0);
    }
}

std::string write_msc_json(const Msc& msc) {
    nlohmann::ordered_json j;
    j["processes"] = msc.processes();
    j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages_of(msc)) {
        nlohmann::ordered_json o;
        o["id"] = m.id;
        o["from"] = m.from;
        o["to"] = m.to;
        o["lost"] = m.lost;
        if (!m.payload.empty()) o["payload"] = m.payload;
        j["messages"].push_back(o);
    }
    nlohmann::ordered_json ord = nlohmann::ordered_json::object();
    for (std::size_t p = 0; p < msc.process_count(); ++p) {
        const auto& ln = msc.line(static_cast<ProcId>(p));
        if (ln.empty()) continue;
        auto arr = nlohmann::ordered_json::array();
        for (EventId e : ln) arr.push_back(msc.event_name(e));
        ord[msc.processes()[p]] = arr;
    }
    j["order"] = ord;
    return j.dump(2) + "\n";
}

Msc parse_msc(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_msc_json(text);
        break;
    }
    return parse_msc_text(text);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Msc load_msc(const std::string& path) { return parse_msc(read_file(path)); }

Execution parse_execution(const std::string& text) {
    Execution ex;
    std::map<std::string, ProcId> pid;
    auto proc = [&](const std::string& name) {
        auto it = pid.find(name);
        if (it != pid.end()) return it->second;
        ProcId id = static_cast<ProcId>(ex.processes.size());
        ex.processes.push_back(name);
        pid[name] = id;
        return id;
    };
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto t = split_ws(raw);
        if (t.empty()) continue;
        if (t[0] == "processes") {
            for (std::size_t i = 1; i < t.size(); ++i) proc(t[i]);
            continue;
        }
        // accept both "! p q m" and "!p q m"
        if (t[0].size() > 1 && (t[0][0] == '!' || t[0][0] == '?')) {
            t.insert(t.begin() + 1, t[0].substr(1));
            t[0] = t[0].substr(0, 1);
        }
        if (t.size() != 4 || (t[0] != "!" && t[0] != "?"))
            throw ParseError("expected '! p q m' or '? p q m'", lineno);
        if (t[1] == t[2]) throw ParseError("self-send on " + t[1] + " is not allowed", lineno);
        Action a{t[0] == "!" ? ActionKind::send : ActionKind::receive, proc(t[1]), proc(t[2]), t[3]};
        ex.actions.push_back(a);
    }
    return ex;
}

}  // namespace msckit
