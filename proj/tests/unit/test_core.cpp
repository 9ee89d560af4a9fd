#include "iccwatch/catalog.hpp"
#include "iccwatch/model.hpp"
#include "iccwatch/taint.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace iccwatch;

namespace {

TaintLabel label(TaintTag tag, const char* method = "m", const char* comp = "p/C") {
    return {tag, method, ComponentId::parse(comp)};
}

}  // namespace

TEST(ComponentId, ParsesAndPrints) {
    const auto id = ComponentId::parse("com.victim/MainActivity");
    EXPECT_EQ(id.package, "com.victim");
    EXPECT_EQ(id.name, "MainActivity");
    EXPECT_EQ(id.str(), "com.victim/MainActivity");
    EXPECT_TRUE(ComponentId::parse("").empty());
    EXPECT_THROW(ComponentId::parse("no-slash"), std::invalid_argument);
}

TEST(Permissions, ShortNamesAreExpanded) {
    EXPECT_EQ(normalize_permission("SEND_SMS"), "android.permission.SEND_SMS");
    EXPECT_EQ(normalize_permission("com.example.CUSTOM"), "com.example.CUSTOM");
}

TEST(LabelSet, UnionExamples) {
    const LabelSet empty;
    EXPECT_TRUE(union_labels(empty, empty).empty());
    const LabelSet lat{label(0x00010004)};
    const LabelSet dev{label(0x00020002)};
    EXPECT_EQ(union_labels(lat, dev), (LabelSet{label(0x00010004), label(0x00020002)}));
    EXPECT_EQ(union_labels(lat, lat), lat);
}

TEST(LabelSet, UnionIsASemilattice) {
    std::mt19937 rng(7);
    auto random_set = [&rng]() {
        LabelSet s;
        const int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) s.insert(label(rng() % 5, i % 2 ? "a" : "b"));
        return s;
    };
    for (int i = 0; i < 500; ++i) {
        const auto a = random_set(), b = random_set(), c = random_set();
        EXPECT_EQ(union_labels(a, b), union_labels(b, a));
        EXPECT_EQ(union_labels(union_labels(a, b), c), union_labels(a, union_labels(b, c)));
        EXPECT_EQ(union_labels(a, a), a);
        EXPECT_TRUE(union_labels(a, b).includes(a));
    }
}

TEST(Catalog, PublishedTagValues) {
    EXPECT_EQ(lookup_tag("TAINT_LOCATION_Latitude"), 0x00010004u);
    EXPECT_EQ(lookup_tag("TAINT_LOCATION_Longitude"), 0x00010008u);
    EXPECT_EQ(lookup_tag("TAINT_sharepreference"), 0x00010018u);
    EXPECT_EQ(lookup_tag("TAINT_network_state"), 0x00010012u);
    EXPECT_THROW(lookup_tag("TAINT_NOT_A_TAG"), UnknownTagError);
}

TEST(Catalog, ShipsMoreThanEightyUniqueTags) {
    const auto& tags = Catalog::defaults().tags;
    EXPECT_GT(tags.size(), 80u);
    std::set<TaintTag> values;
    for (const auto& [name, tag] : tags.entries()) {
        EXPECT_TRUE(values.insert(tag).second) << name;
        EXPECT_EQ(tags.name_of(tag), name);
        EXPECT_EQ(tags.lookup(tags.name_of(tag)), tag);
    }
}

TEST(Catalog, SourcesMapToPermissions) {
    const auto& m = Catalog::defaults().methods;
    EXPECT_EQ(m.source("getLatitude")->permission, "android.permission.ACCESS_FINE_LOCATION");
    EXPECT_EQ(m.source("getDeviceId")->permission, "android.permission.READ_PHONE_STATE");
    EXPECT_FALSE(m.sink("Log.v")->permission.has_value());
    EXPECT_TRUE(m.sink("Log.v")->exfiltrating);
    EXPECT_FALSE(m.sink("Editor.putString")->exfiltrating);
}

TEST(Catalog, JsonRoundTrip) {
    const Catalog& d = Catalog::defaults();
    const Catalog back = Catalog::from_json(d.to_json());
    EXPECT_EQ(back.tags.entries(), d.tags.entries());
    EXPECT_EQ(back.methods.sources.size(), d.methods.sources.size());
    EXPECT_EQ(back.methods.sinks.size(), d.methods.sinks.size());
    EXPECT_EQ(back.to_json(), d.to_json());
}

TEST(Catalog, RejectsDuplicateTagValues) {
    TagCatalog t;
    t.add("A", 1);
    EXPECT_THROW(t.add("B", 1), CatalogError);
    EXPECT_THROW(t.add("A", 2), CatalogError);
    EXPECT_THROW(Catalog::from_json(R"({"tags":{"X":"0x1"},"sources":{"s":{"tag":"Y","permission":null}},"sinks":{}})"),
                 std::exception);
}

TEST(FilterMatches, ActionCategoryAndData) {
    FilterSpec f;
    f.actions = {"A"};
    f.categories = {"C1", "C2"};
    IntentRecord in;
    EXPECT_FALSE(filter_matches(f, in));  // implicit intent without action
    in.action = "A";
    EXPECT_TRUE(filter_matches(f, in));
    in.categories = {"C1"};
    EXPECT_TRUE(filter_matches(f, in));
    in.categories = {"C3"};
    EXPECT_FALSE(filter_matches(f, in));
    in.categories.clear();
    in.scheme = "http";
    EXPECT_FALSE(filter_matches(f, in));
    f.data_schemes = {"http"};
    EXPECT_TRUE(filter_matches(f, in));
    FilterSpec empty;
    EXPECT_FALSE(filter_matches(empty, in));
}
