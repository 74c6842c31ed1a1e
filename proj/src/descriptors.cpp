#include "semmap/descriptors.hpp"

#include "semmap/errors.hpp"
#include "semmap/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace semmap {

void MaterialDescriptor::validate() const {
    if (!is_material(cls)) throw ContractError("material descriptor needs a material class");
    if (!(width > 0.0 && height > 0.0)) {
        throw ContractError("material descriptor extent must be positive");
    }
    if (!(std::abs(rotation.normal.norm() - 1.0) <= 1e-9)) {
        throw ContractError("material descriptor normal must have unit length");
    }
    if (!position.vec().allFinite() || !std::isfinite(rotation.angle)) {
        throw ContractError("material descriptor fields must be finite");
    }
}

void DynamicDescriptor::validate() const {
    if (!is_dynamic(cls)) throw ContractError("dynamic descriptor needs a dynamic class");
    if (!(width > 0.0 && depth > 0.0 && height > 0.0)) {
        throw ContractError("dynamic descriptor dimensions must be positive");
    }
    if (!position.vec().allFinite()) throw ContractError("dynamic descriptor position must be finite");
}

DescriptorId descriptor_id(const Descriptor& d) {
    return std::visit([](const auto& x) { return x.id; }, d);
}

DescriptorId DescriptorStore::add(Descriptor d) {
    const DescriptorId id = next_id_++;
    std::visit(
        [id](auto& x) {
            x.id = id;
            x.validate();
        },
        d);
    items_.push_back(std::move(d));
    return id;
}

bool DescriptorStore::erase(DescriptorId id) {
    const auto it = std::find_if(items_.begin(), items_.end(),
                                 [id](const Descriptor& d) { return descriptor_id(d) == id; });
    if (it == items_.end()) return false;
    items_.erase(it);
    return true;
}

const Descriptor* DescriptorStore::find(DescriptorId id) const {
    for (const auto& d : items_) {
        if (descriptor_id(d) == id) return &d;
    }
    return nullptr;
}

std::string format_store(const DescriptorStore& store) {
    std::string out = "semmap-store " + std::to_string(DescriptorStore::kVersion) + "\n";
    out += "next_id " + std::to_string(store.next_id()) + "\n";
    auto num = [&out](double v) {
        out += ' ';
        out += format_double(v);
    };
    for (const auto& item : store.items()) {
        if (const auto* m = std::get_if<MaterialDescriptor>(&item)) {
            out += std::to_string(m->id) + " material " + std::to_string(index_of(m->cls));
            num(m->width);
            num(m->height);
            num(m->position.easting);
            num(m->position.northing);
            num(m->position.up);
            num(m->rotation.normal.x());
            num(m->rotation.normal.y());
            num(m->rotation.normal.z());
            num(m->rotation.angle);
        } else {
            const auto& d = std::get<DynamicDescriptor>(item);
            out += std::to_string(d.id) + " dynamic " + std::to_string(index_of(d.cls));
            num(d.width);
            num(d.depth);
            num(d.height);
            num(d.position.easting);
            num(d.position.northing);
            num(d.position.up);
        }
        out += '\n';
    }
    return out;
}

DescriptorStore parse_store(std::string_view text, const std::string& source) {
    DescriptorStore store;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    bool have_next = false;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (!have_header) {
            long long version = 0;
            if (tok.size() != 2 || tok[0] != "semmap-store" || !parse_int(tok[1], version)) {
                throw ParseError(source, line_no, "missing 'semmap-store <version>' header");
            }
            if (version != DescriptorStore::kVersion) {
                throw IncompatibleVersionError(source + ": store version " + std::to_string(version) +
                                               " is not supported (expected " +
                                               std::to_string(DescriptorStore::kVersion) + ")");
            }
            have_header = true;
            continue;
        }
        if (!have_next) {
            long long next = 0;
            if (tok.size() != 2 || tok[0] != "next_id" || !parse_int(tok[1], next) || next < 1) {
                throw ParseError(source, line_no, "expected 'next_id <n>'");
            }
            store.next_id_ = static_cast<DescriptorId>(next);
            have_next = true;
            continue;
        }
        if (tok.size() < 3) throw ParseError(source, line_no, "truncated descriptor record");
        long long id = 0;
        long long cls = 0;
        if (!parse_int(tok[0], id) || id < 1 || !parse_int(tok[2], cls) || cls < 0 ||
            cls >= kNumClasses) {
            throw ParseError(source, line_no, "bad descriptor id or class");
        }
        std::vector<double> v;
        for (std::size_t i = 3; i < tok.size(); ++i) {
            double x = 0.0;
            if (!parse_double(tok[i], x)) {
                throw ParseError(source, line_no, "bad number '" + std::string(tok[i]) + "'");
            }
            v.push_back(x);
        }
        Descriptor item;
        if (tok[1] == "material") {
            if (v.size() != 9) throw ParseError(source, line_no, "material record needs 9 numbers");
            MaterialDescriptor m;
            m.id = static_cast<DescriptorId>(id);
            m.cls = static_cast<ClassId>(cls);
            m.width = v[0];
            m.height = v[1];
            m.position = {v[2], v[3], v[4]};
            m.rotation.normal = {v[5], v[6], v[7]};
            m.rotation.angle = v[8];
            item = m;
        } else if (tok[1] == "dynamic") {
            if (v.size() != 6) throw ParseError(source, line_no, "dynamic record needs 6 numbers");
            DynamicDescriptor d;
            d.id = static_cast<DescriptorId>(id);
            d.cls = static_cast<ClassId>(cls);
            d.width = v[0];
            d.depth = v[1];
            d.height = v[2];
            d.position = {v[3], v[4], v[5]};
            item = d;
        } else {
            throw ParseError(source, line_no, "unknown descriptor kind '" + std::string(tok[1]) + "'");
        }
        try {
            std::visit([](const auto& x) { x.validate(); }, item);
        } catch (const ContractError& e) {
            throw ParseError(source, line_no, e.what());
        }
        if (store.find(static_cast<DescriptorId>(id)) != nullptr ||
            static_cast<DescriptorId>(id) >= store.next_id_) {
            throw ParseError(source, line_no, "descriptor id is duplicated or not below next_id");
        }
        store.items_.push_back(item);
    }
    if (!have_header || !have_next) throw ParseError(source + ": incomplete store header");
    return store;
}

void save_store(const DescriptorStore& store, const std::filesystem::path& path) {
    write_file_atomic(path, format_store(store));
}

DescriptorStore load_store(const std::filesystem::path& path) {
    return parse_store(read_file(path), path.string());
}

}  // namespace semmap
