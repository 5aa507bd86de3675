#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "carecoord/domain.hpp"

namespace carecoord {

struct SimRecord {
    std::uint64_t tick = 0;
    std::string user_id;
    int day = 0;
    int minute = 0;
    std::string kind; // reminder, decision, sample, meal, feature, alert, guidance, note
    ojson body;
    std::uint64_t user_seq = 0; // per-user append order, assigned by SimLog
};

// Append-only run record. Users append in their own order; exports
// merge by (tick, user_id, user_seq) so the bytes are independent of
// how user work was interleaved.
class SimLog {
public:
    void append(SimRecord r);

    const std::vector<SimRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::vector<const SimRecord*> sorted() const;

    void to_jsonl(std::ostream& os) const;
    static SimLog from_jsonl(std::istream& is);

    std::string features_csv() const;

private:
    std::vector<SimRecord> records_;
    std::map<std::string, std::uint64_t> user_seq_;
};

ojson record_to_json(const SimRecord& r);
SimRecord record_from_json(const ojson& j);

// Throws std::runtime_error naming the path on failure.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace carecoord
