#include "iccwatch/catalog.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>

namespace iccwatch {

using nlohmann::json;

void TagCatalog::add(std::string name, TaintTag tag) {
    if (by_name_.count(name) != 0) throw CatalogError("duplicate tag name " + name);
    if (by_tag_.count(tag) != 0) throw CatalogError("duplicate tag value for " + name);
    by_tag_.emplace(tag, name);
    by_name_.emplace(std::move(name), tag);
}

TaintTag TagCatalog::lookup(std::string_view name) const {
    const auto it = by_name_.find(name);
    if (it == by_name_.end()) throw UnknownTagError("unknown taint tag '" + std::string(name) + "'");
    return it->second;
}

const std::string& TagCatalog::name_of(TaintTag tag) const {
    const auto it = by_tag_.find(tag);
    if (it == by_tag_.end()) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "0x%08x", tag);
        throw UnknownTagError(std::string("unknown taint tag ") + buf);
    }
    return it->second;
}

bool TagCatalog::contains(std::string_view name) const { return by_name_.find(name) != by_name_.end(); }

const SourceMethod* MethodCatalog::source(std::string_view method) const {
    const auto it = sources.find(method);
    return it == sources.end() ? nullptr : &it->second;
}

const SinkMethod* MethodCatalog::sink(std::string_view method) const {
    const auto it = sinks.find(method);
    return it == sinks.end() ? nullptr : &it->second;
}

TaintTag Catalog::intent_retaint_tag() const { return tags.lookup(kIntentRetaintTagName); }

void Catalog::validate() const {
    for (const auto& [method, src] : methods.sources) {
        if (!tags.contains(src.tag)) throw CatalogError("source " + method + " uses an unregistered tag");
    }
    if (!tags.contains(kIntentRetaintTagName)) {
        throw CatalogError("catalog must register " + std::string(kIntentRetaintTagName));
    }
}

namespace {

// Published constants first; everything else gets 0x0002xxxx so no value collides.
constexpr std::array<std::pair<std::string_view, TaintTag>, 4> kPublishedTags{{
    {"TAINT_LOCATION_Latitude", 0x00010004},
    {"TAINT_LOCATION_Longitude", 0x00010008},
    {"TAINT_network_state", 0x00010012},
    {"TAINT_sharepreference", 0x00010018},
}};

constexpr std::array<std::string_view, 80> kGeneratedTags{
    "TAINT_INTENT_EXTRA",      "TAINT_DEVICE_ID",          "TAINT_IMSI",
    "TAINT_ICCID",             "TAINT_PHONE_NUMBER",       "TAINT_DEVICE_SN",
    "TAINT_CONTACTS",          "TAINT_CALL_LOG",           "TAINT_SMS",
    "TAINT_MMS",               "TAINT_CALENDAR",           "TAINT_ACCOUNTS",
    "TAINT_BROWSER_HISTORY",   "TAINT_BOOKMARKS",          "TAINT_USER_INPUT",
    "TAINT_CLIPBOARD",         "TAINT_FILE_CONTENT",       "TAINT_DATABASE",
    "TAINT_CONTENT_PROVIDER",  "TAINT_APPLICATION_OBJECT", "TAINT_LOCATION_GPS",
    "TAINT_LOCATION_NET",      "TAINT_LOCATION_LAST",      "TAINT_LOCATION_Altitude",
    "TAINT_LOCATION_Speed",    "TAINT_LOCATION_Bearing",   "TAINT_CELL_ID",
    "TAINT_CELL_LAC",          "TAINT_NETWORK_OPERATOR",   "TAINT_SIM_OPERATOR",
    "TAINT_WIFI_SSID",         "TAINT_WIFI_BSSID",         "TAINT_WIFI_SCAN",
    "TAINT_MAC_ADDRESS",       "TAINT_IP_ADDRESS",         "TAINT_BLUETOOTH_ADDRESS",
    "TAINT_BLUETOOTH_DEVICES", "TAINT_INSTALLED_PACKAGES", "TAINT_RUNNING_PROCESSES",
    "TAINT_ANDROID_ID",        "TAINT_ADVERTISING_ID",     "TAINT_SERIAL_NUMBER",
    "TAINT_MICROPHONE",        "TAINT_CAMERA",             "TAINT_PHOTOS",
    "TAINT_MEDIA_AUDIO",       "TAINT_MEDIA_VIDEO",        "TAINT_NOTIFICATIONS",
    "TAINT_KEYSTROKES",        "TAINT_PASSWORD",           "TAINT_EMAIL",
    "TAINT_CREDIT_CARD",       "TAINT_HEALTH",             "TAINT_FINGERPRINT",
    "TAINT_SENSOR_ACCELEROMETER", "TAINT_SENSOR_GYROSCOPE", "TAINT_SENSOR_MAGNETOMETER",
    "TAINT_SENSOR_LIGHT",      "TAINT_SENSOR_PROXIMITY",   "TAINT_SENSOR_PRESSURE",
    "TAINT_SENSOR_GRAVITY",    "TAINT_SENSOR_LINEAR_ACCELERATION", "TAINT_SENSOR_ROTATION_VECTOR",
    "TAINT_SENSOR_ORIENTATION", "TAINT_SENSOR_TEMPERATURE", "TAINT_SENSOR_HUMIDITY",
    "TAINT_SENSOR_STEP_COUNTER", "TAINT_SENSOR_HEART_RATE", "TAINT_SENSOR_GAME_ROTATION",
    "TAINT_SENSOR_SIGNIFICANT_MOTION", "TAINT_BATTERY_STATE", "TAINT_SCREEN_STATE",
    "TAINT_SYSTEM_SETTINGS",   "TAINT_TIMEZONE",           "TAINT_LOCALE",
    "TAINT_USER_DICTIONARY",   "TAINT_DOWNLOADS",          "TAINT_EXTERNAL_STORAGE",
    "TAINT_NFC",               "TAINT_USB_DEVICES",
};

struct SourceRow {
    std::string_view method;
    std::string_view tag;
    std::string_view permission;  // empty: none required
};

constexpr std::array<SourceRow, 22> kSources{{
    {"getLatitude", "TAINT_LOCATION_Latitude", "ACCESS_FINE_LOCATION"},
    {"getLongitude", "TAINT_LOCATION_Longitude", "ACCESS_FINE_LOCATION"},
    {"getLastKnownLocation", "TAINT_LOCATION_LAST", "ACCESS_FINE_LOCATION"},
    {"getCellLocation", "TAINT_CELL_ID", "ACCESS_COARSE_LOCATION"},
    {"getDeviceId", "TAINT_DEVICE_ID", "READ_PHONE_STATE"},
    {"getSubscriberId", "TAINT_IMSI", "READ_PHONE_STATE"},
    {"getSimSerialNumber", "TAINT_ICCID", "READ_PHONE_STATE"},
    {"getLine1Number", "TAINT_PHONE_NUMBER", "READ_PHONE_STATE"},
    {"getActiveNetworkInfo", "TAINT_network_state", "ACCESS_NETWORK_STATE"},
    {"getSharedPreferenceValue", "TAINT_sharepreference", ""},
    {"queryContacts", "TAINT_CONTACTS", "READ_CONTACTS"},
    {"queryCallLog", "TAINT_CALL_LOG", "READ_CALL_LOG"},
    {"readSms", "TAINT_SMS", "READ_SMS"},
    {"getAccounts", "TAINT_ACCOUNTS", "GET_ACCOUNTS"},
    {"getUserInput", "TAINT_USER_INPUT", ""},
    {"getClipboardText", "TAINT_CLIPBOARD", ""},
    {"readExternalFile", "TAINT_FILE_CONTENT", "READ_EXTERNAL_STORAGE"},
    {"getMacAddress", "TAINT_MAC_ADDRESS", "ACCESS_WIFI_STATE"},
    {"getConnectionInfo", "TAINT_WIFI_SSID", "ACCESS_WIFI_STATE"},
    {"getInstalledPackages", "TAINT_INSTALLED_PACKAGES", ""},
    {"getAccelerometer", "TAINT_SENSOR_ACCELEROMETER", ""},
    {"recordAudio", "TAINT_MICROPHONE", "RECORD_AUDIO"},
}};

struct SinkRow {
    std::string_view method;
    std::string_view permission;
    bool exfiltrating;
};

constexpr std::array<SinkRow, 11> kSinks{{
    {"Log.v", "", true},
    {"Log.d", "", true},
    {"Log.i", "", true},
    {"SmsManager.sendTextMessage", "SEND_SMS", true},
    {"FileOutputStream.write", "WRITE_EXTERNAL_STORAGE", true},
    {"URLConnection.openConnection", "INTERNET", true},
    {"Socket.write", "INTERNET", true},
    {"BluetoothSocket.write", "BLUETOOTH", true},
    {"Editor.putString", "", false},
    {"SQLiteDatabase.insert", "", false},
    {"ContentResolver.insert", "", false},
}};

Catalog build_defaults() {
    Catalog c;
    for (const auto& [name, tag] : kPublishedTags) c.tags.add(std::string(name), tag);
    TaintTag next = 0x00020001;
    for (const auto name : kGeneratedTags) c.tags.add(std::string(name), next++);
    for (const auto& row : kSources) {
        SourceMethod src;
        src.tag = c.tags.lookup(row.tag);
        if (!row.permission.empty()) src.permission = normalize_permission(row.permission);
        c.methods.sources.emplace(std::string(row.method), src);
    }
    for (const auto& row : kSinks) {
        SinkMethod sink;
        if (!row.permission.empty()) sink.permission = normalize_permission(row.permission);
        sink.exfiltrating = row.exfiltrating;
        c.methods.sinks.emplace(std::string(row.method), sink);
    }
    c.validate();
    return c;
}

std::string hex_tag(TaintTag tag) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", tag);
    return buf;
}

TaintTag parse_hex_tag(const std::string& text) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(text.c_str(), &end, 0);
    if (text.empty() || end == nullptr || *end != '\0' || value > 0xffffffffUL) {
        throw CatalogError("bad tag value '" + text + "'");
    }
    return static_cast<TaintTag>(value);
}

std::optional<std::string> optional_permission(const json& node) {
    if (!node.contains("permission") || node.at("permission").is_null()) return std::nullopt;
    return normalize_permission(node.at("permission").get<std::string>());
}

}  // namespace

const Catalog& Catalog::defaults() {
    static const Catalog catalog = build_defaults();
    return catalog;
}

Catalog Catalog::from_json(std::string_view text) {
    Catalog c;
    try {
        const json doc = json::parse(text);
        for (const auto& [name, value] : doc.at("tags").items()) {
            c.tags.add(name, value.is_string() ? parse_hex_tag(value.get<std::string>())
                                               : value.get<TaintTag>());
        }
        const json sources = doc.value("sources", json::object());
        for (const auto& [method, node] : sources.items()) {
            SourceMethod src;
            src.tag = c.tags.lookup(node.at("tag").get<std::string>());
            src.permission = optional_permission(node);
            c.methods.sources.emplace(method, src);
        }
        const json sinks = doc.value("sinks", json::object());
        for (const auto& [method, node] : sinks.items()) {
            SinkMethod sink;
            sink.permission = optional_permission(node);
            sink.exfiltrating = node.value("exfiltrating", true);
            c.methods.sinks.emplace(method, sink);
        }
    } catch (const json::exception& e) {
        throw CatalogError(std::string("catalog config: ") + e.what());
    } catch (const UnknownTagError& e) {
        throw CatalogError(std::string("catalog config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string Catalog::to_json() const {
    json doc;
    doc["tags"] = json::object();
    for (const auto& [name, tag] : tags.entries()) doc["tags"][name] = hex_tag(tag);
    doc["sources"] = json::object();
    for (const auto& [method, src] : methods.sources) {
        json node{{"tag", tags.name_of(src.tag)}};
        node["permission"] = src.permission ? json(*src.permission) : json(nullptr);
        doc["sources"][method] = node;
    }
    doc["sinks"] = json::object();
    for (const auto& [method, sink] : methods.sinks) {
        json node{{"exfiltrating", sink.exfiltrating}};
        node["permission"] = sink.permission ? json(*sink.permission) : json(nullptr);
        doc["sinks"][method] = node;
    }
    return doc.dump(2);
}

TaintTag lookup_tag(std::string_view name) { return Catalog::defaults().tags.lookup(name); }

}  // namespace iccwatch
