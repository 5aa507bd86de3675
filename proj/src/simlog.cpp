#include "carecoord/simlog.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace carecoord {

void SimLog::append(SimRecord r) {
    r.user_seq = user_seq_[r.user_id]++;
    records_.push_back(std::move(r));
}

std::vector<const SimRecord*> SimLog::sorted() const {
    std::vector<const SimRecord*> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(&r);
    std::sort(out.begin(), out.end(), [](const SimRecord* a, const SimRecord* b) {
        return std::tie(a->tick, a->user_id, a->user_seq) <
               std::tie(b->tick, b->user_id, b->user_seq);
    });
    return out;
}

ojson record_to_json(const SimRecord& r) {
    ojson j;
    j["tick"] = r.tick;
    j["user_id"] = r.user_id;
    j["day"] = r.day;
    j["minute"] = r.minute;
    j["kind"] = r.kind;
    j["seq"] = r.user_seq;
    j["body"] = r.body;
    return j;
}

SimRecord record_from_json(const ojson& j) {
    SimRecord r;
    r.tick = j.at("tick").get<std::uint64_t>();
    r.user_id = j.at("user_id").get<std::string>();
    r.day = j.at("day").get<int>();
    r.minute = j.at("minute").get<int>();
    r.kind = j.at("kind").get<std::string>();
    r.user_seq = j.at("seq").get<std::uint64_t>();
    r.body = j.at("body");
    return r;
}

void SimLog::to_jsonl(std::ostream& os) const {
    for (const SimRecord* r : sorted()) os << record_to_json(*r).dump() << '\n';
}

SimLog SimLog::from_jsonl(std::istream& is) {
    SimLog log;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        SimRecord r = record_from_json(ojson::parse(line));
        // Seq comes from the file; bypass the counter to keep the
        // round trip exact.
        log.records_.push_back(std::move(r));
    }
    for (const auto& r : log.records_) {
        auto& next = log.user_seq_[r.user_id];
        next = std::max(next, r.user_seq + 1);
    }
    return log;
}

std::string SimLog::features_csv() const {
    std::string csv = "user_id,day,adherence,glucose_z,hr_z,steps_z,hydration_frac\n";
    for (const SimRecord* r : sorted()) {
        if (r->kind != "feature") continue;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      r->user_id.c_str(), r->day,
                      r->body.at("adherence").get<double>(),
                      r->body.at("glucose_z").get<double>(),
                      r->body.at("hr_z").get<double>(),
                      r->body.at("steps_z").get<double>(),
                      r->body.at("hydration_frac").get<double>());
        csv += buf;
    }
    return csv;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace carecoord
