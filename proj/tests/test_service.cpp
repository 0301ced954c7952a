#include <oga/service/service.hpp>

#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace oga;
using namespace oga::service;
using oga::testing::TempDir;
using Json = nlohmann::json;

namespace {

std::string gml_of(const Graph& g) { return formats::serialize(g, formats::gml).bytes; }

ServiceConfig test_config(const std::filesystem::path& dir) {
    ServiceConfig cfg;
    cfg.data_dir = dir;
    cfg.listen_port = 0;
    cfg.background_worker = false;
    return cfg;
}

/// A running service plus a client and a write token.
struct Harness {
    explicit Harness(ServiceConfig cfg) : svc(std::move(cfg)), port(svc.start()), client("127.0.0.1", port) {
        token = svc.archive().create_token("alice").token;
        client.set_read_timeout(60, 0);
    }

    httplib::Headers auth() const { return {{"Authorization", "Bearer " + token}}; }

    /// Uploads and returns the new id; fails the test on any other status.
    std::string upload(const std::string& bytes, const std::string& query) {
        auto r = client.Post("/graphs?" + query, auth(), bytes, "text/plain");
        EXPECT_TRUE(r);
        if (!r) return {};
        EXPECT_EQ(r->status, 201) << r->body;
        return Json::parse(r->body).value("id", "");
    }

    Json get_json(const std::string& path, int expected = 200) {
        auto r = client.Get(path);
        EXPECT_TRUE(r) << path;
        if (!r) return {};
        EXPECT_EQ(r->status, expected) << path << "\n" << r->body;
        return Json::parse(r->body);
    }

    Service svc;
    int port;
    httplib::Client client;
    std::string token;
};

std::set<std::string> search_all(Harness& h, const std::string& query) {
    std::set<std::string> ids;
    for (int page = 1;; ++page) {
        auto j = h.get_json("/search?" + query + "&page_size=500&page=" + std::to_string(page));
        for (const auto& r : j["results"]) ids.insert(r["id"].get<std::string>());
        if (j["results"].size() < 500) break;
    }
    return ids;
}

} // namespace

TEST(Service, UploadAnalyzeLifecycle) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto r = h.client.Post("/graphs?name=k4&tag=small", h.auth(), gml_of(oga::testing::complete(4)), "text/plain");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 201) << r->body;
    auto body = Json::parse(r->body);
    std::string id = body["id"];
    EXPECT_EQ(body["uri"], "/graphs/" + id);
    EXPECT_EQ(r->get_header_value("Location"), "/graphs/" + id);
    EXPECT_EQ(body["status"], "pending-analysis");
    EXPECT_EQ(body["format"], "gml");

    auto pending = h.get_json("/graphs/" + id);
    EXPECT_EQ(pending["status"], "pending-analysis");
    EXPECT_TRUE(pending["properties"].is_null());
    EXPECT_EQ(pending["metadata"]["creator"], "alice");
    EXPECT_EQ(h.client.Get("/graphs/" + id + "/image.svg")->status, 409);

    EXPECT_EQ(h.svc.worker().drain(), 1u);
    auto done = h.get_json("/graphs/" + id);
    EXPECT_EQ(done["status"], "analyzed");
    EXPECT_EQ(done["properties"]["is_planar"], true);
    EXPECT_EQ(done["properties"]["vertex_connectivity"], 3);
    auto svg = h.client.Get("/graphs/" + id + "/image.svg");
    ASSERT_EQ(svg->status, 200);
    EXPECT_EQ(svg->get_header_value("Content-Type"), "image/svg+xml");
    EXPECT_NE(svg->body.find("<svg"), std::string::npos);
}

TEST(Service, BackgroundWorkerFinishesUploads) {
    TempDir dir;
    auto cfg = test_config(dir.path());
    cfg.background_worker = true;
    cfg.worker.idle_poll = std::chrono::milliseconds(20);
    Harness h(cfg);
    auto id = h.upload(gml_of(oga::testing::cycle(6)), "name=c6");
    std::string status;
    for (int i = 0; i < 500 && status != "analyzed"; ++i) {
        status = h.get_json("/graphs/" + id)["status"];
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    EXPECT_EQ(status, "analyzed");
}

TEST(Service, RestartKeepsOriginalBytes) {
    TempDir dir;
    std::string original = "c upload as typed\nc   odd   spacing kept\np  edge 3 2\ne 1 2\ne  2   3\n\n";
    std::string id;
    {
        Harness h(test_config(dir.path()));
        id = h.upload(original, "name=path&format=dimacs");
        h.svc.worker().drain();
    }
    Harness h(test_config(dir.path()));
    auto r = h.client.Get("/graphs/" + id + "/download");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(r->body, original);
    EXPECT_EQ(r->get_header_value("X-OGA-Format"), "dimacs");
    EXPECT_EQ(h.get_json("/graphs/" + id)["status"], "analyzed");
}

TEST(Service, GuestsReadButCannotWrite) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto id = h.upload(gml_of(oga::testing::complete(3)), "name=k3");
    h.svc.worker().drain();

    httplib::Client guest("127.0.0.1", h.port);
    EXPECT_EQ(guest.Get("/graphs/" + id)->status, 200);
    EXPECT_EQ(guest.Get("/graphs/" + id + "/properties")->status, 200);
    EXPECT_EQ(guest.Get("/graphs/" + id + "/image.svg")->status, 200);
    EXPECT_EQ(guest.Get("/search?all=true")->status, 200);

    auto denied = guest.Post("/graphs?name=x", gml_of(oga::testing::complete(3)), "text/plain");
    EXPECT_EQ(denied->status, 401);
    EXPECT_EQ(denied->get_header_value("WWW-Authenticate"), "Bearer");
    EXPECT_EQ(guest.Post("/graphs/" + id + "/comments", R"({"text":"hi"})", "application/json")->status, 401);
    EXPECT_EQ(guest.Delete("/graphs/" + id)->status, 401);
    httplib::Headers bad{{"Authorization", "Bearer not-a-token"}};
    EXPECT_EQ(guest.Post("/graphs?name=x", bad, "p edge 1 0\n", "text/plain")->status, 401);
    EXPECT_EQ(h.svc.archive().record_count(), 1u);
}

TEST(Service, OpenModeAcceptsAnonymousWrites) {
    TempDir dir;
    auto cfg = test_config(dir.path());
    cfg.open_mode = true;
    Harness h(cfg);
    httplib::Client guest("127.0.0.1", h.port);
    auto r = guest.Post("/graphs?name=x&creator=bob", "p edge 2 1\ne 1 2\n", "text/plain");
    ASSERT_EQ(r->status, 201) << r->body;
    EXPECT_EQ(h.get_json("/graphs/" + Json::parse(r->body)["id"].get<std::string>())["metadata"]["creator"], "bob");
}

TEST(Service, MalformedUploadIsRejectedWithPosition) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto r = h.client.Post("/graphs?name=bad&format=gml", h.auth(), "graph [\n  node [ id 1 ]\n  edge [ source 1 target 9 ]\n]\n",
                           "text/plain");
    ASSERT_EQ(r->status, 400);
    auto body = Json::parse(r->body);
    EXPECT_EQ(body["error"], "ParseFailed");
    EXPECT_EQ(body["cause"], "SyntaxError");
    EXPECT_EQ(body["line"], 3) << "the edge naming a missing node";

    r = h.client.Post("/graphs?name=bad&format=gml", h.auth(), "graph [\n  node [ id 1 \n", "text/plain");
    ASSERT_EQ(r->status, 400);
    body = Json::parse(r->body);
    EXPECT_EQ(body["cause"], "SyntaxError");
    EXPECT_TRUE(body["line"].is_number());
    EXPECT_TRUE(body["column"].is_number());

    EXPECT_EQ(h.client.Post("/graphs?name=x", h.auth(), "hello world", "text/plain")->status, 400);
    EXPECT_EQ(h.client.Post("/graphs?name=x&format=nope", h.auth(), "p edge 1 0\n", "text/plain")->status, 400);
    EXPECT_EQ(h.client.Post("/graphs", h.auth(), "p edge 1 0\n", "text/plain")->status, 400) << "name is mandatory";
    EXPECT_EQ(h.svc.archive().record_count(), 0u);
}

TEST(Service, MultipartUploadWithMetadata) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    httplib::MultipartFormDataItems items{
        {"file", gml_of(oga::testing::cycle(5)), "c5.gml", "text/plain"},
        {"metadata", R"({"name":"five","creator":"carol","creation_method":"by hand","tags":["cycle",{"value":"Chemistry","kind":"application-domain"}]})",
         "", "application/json"}};
    auto r = h.client.Post("/graphs", h.auth(), items);
    ASSERT_EQ(r->status, 201) << r->body;
    auto rec = h.get_json("/graphs/" + Json::parse(r->body)["id"].get<std::string>());
    EXPECT_EQ(rec["metadata"]["name"], "five");
    EXPECT_EQ(rec["metadata"]["creator"], "carol");
    EXPECT_EQ(rec["metadata"]["creation_method"], "by hand");
    EXPECT_EQ(rec["metadata"]["tags"].size(), 2u);
    EXPECT_EQ(rec["node_count"], 5);
}

TEST(Service, UploadTooLarge) {
    TempDir dir;
    auto cfg = test_config(dir.path());
    cfg.max_upload_bytes = 1024;
    Harness h(cfg);
    auto r = h.client.Post("/graphs?name=big", h.auth(), gml_of(oga::testing::complete(30)), "text/plain");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 413);
    EXPECT_EQ(h.svc.archive().record_count(), 0u);
}

TEST(Service, LicenseAcknowledgement) {
    TempDir dir;
    auto cfg = test_config(dir.path());
    cfg.require_license_ack = true;
    Harness h(cfg);
    EXPECT_EQ(h.client.Post("/graphs?name=x", h.auth(), "p edge 1 0\n", "text/plain")->status, 400);
    EXPECT_EQ(h.client.Post("/graphs?name=x&license_ack=true", h.auth(), "p edge 1 0\n", "text/plain")->status, 201);
}

TEST(Service, SearchFiltersAreMonotone) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    std::mt19937_64 rng(11);
    const std::vector<std::string> tags{"alpha", "beta", "gamma"};
    for (int i = 0; i < 24; ++i) {
        Graph g = oga::testing::random_graph(rng, 3 + i, 0.1 + 0.03 * (i % 10), i % 4 == 0);
        h.upload(gml_of(g), "name=g" + std::to_string(i) + "&tag=" + tags[i % 3] + (i % 5 == 0 ? "&tag=beta" : ""));
    }
    h.svc.worker().drain();
    const std::vector<std::string> atoms{
        "tag=alpha", "tag=beta", "tag=gamma", "planar=true", "planar=false", "connected=true", "directed=false",
        "min_nodes=8", "max_nodes=15", "min_edges=10", "max_density=0.3", "min_max_degree=4", "q=g1", "name=2",
        "bipartite=false", "acyclic=true", "creator=alice", "from=2000-01-01"};
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::string q = atoms[pick(rng)];
        std::string refined = q + "&" + atoms[pick(rng)];
        auto wide = search_all(h, q);
        auto narrow = search_all(h, refined);
        for (const auto& id : narrow) EXPECT_TRUE(wide.count(id)) << refined << " returned " << id << " but " << q << " did not";
    }
    EXPECT_EQ(search_all(h, "all=true").size(), 24u);
    EXPECT_EQ(search_all(h, "tag=alpha").size(), 8u);
}

TEST(Service, SearchExamplesAndErrors) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto k4 = h.upload(gml_of(oga::testing::complete(4)), "name=k4&tag=complete");
    auto k5 = h.upload(gml_of(oga::testing::complete(5)), "name=k5&tag=complete");
    h.svc.worker().drain();

    auto planar = h.get_json("/search?tag=complete&planar=true");
    EXPECT_EQ(planar["total"], 1);
    EXPECT_EQ(planar["results"][0]["id"], k4);
    EXPECT_EQ(planar["results"][0]["thumbnail"], "/graphs/" + k4 + "/image.svg");
    EXPECT_EQ(h.get_json("/search?tag=complete&planar=false")["results"][0]["id"], k5);
    EXPECT_EQ(h.get_json("/search?tag=COMPLETE")["total"], 2) << "tags are normalized";
    EXPECT_EQ(h.get_json("/search?min_nodes=5&max_nodes=5")["total"], 1);

    EXPECT_EQ(h.get_json("/search?planar=maybe", 400)["error"], "InvalidQuery");
    EXPECT_EQ(h.get_json("/search?colour=red", 400)["error"], "UnknownProperty");
    EXPECT_EQ(h.get_json("/search?min_colour=1", 400)["error"], "UnknownProperty");
    EXPECT_EQ(h.get_json("/search?min_nodes=ten", 400)["error"], "InvalidQuery");
    EXPECT_EQ(h.get_json("/search", 400)["error"], "InvalidQuery");
    EXPECT_EQ(h.get_json("/search?all=true&page_size=501", 400)["error"], "InvalidQuery");
    EXPECT_EQ(h.get_json("/search?from=yesterday", 400)["error"], "InvalidQuery");
}

TEST(Service, CompareTallies) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto k4 = h.upload(gml_of(oga::testing::complete(4)), "name=k4");
    auto k5 = h.upload(gml_of(oga::testing::complete(5)), "name=k5");
    auto c4 = h.upload(gml_of(oga::testing::cycle(4)), "name=c4");
    auto k33 = h.upload(gml_of(oga::testing::complete_bipartite(3, 3)), "name=k33");
    auto pending = h.upload(gml_of(oga::testing::cycle(3)), "name=late");
    EXPECT_EQ(h.get_json("/compare?ids=" + k4 + "," + pending, 409)["error"], "NotReady");
    h.svc.worker().drain();

    auto tally = [&](const Json& view, const std::string& prop) {
        for (const auto& row : view["rows"])
            if (row["property"] == prop) return row.value("tally", std::string("-"));
        return std::string("missing");
    };
    auto a = h.get_json("/compare?ids=" + k4 + "," + k5);
    EXPECT_EQ(tally(a, "is_planar"), "some");
    EXPECT_EQ(a["ids"], Json::array({k4, k5}));
    EXPECT_EQ(tally(h.get_json("/compare?ids=" + k4 + "," + c4), "is_connected"), "all");
    EXPECT_EQ(tally(h.get_json("/compare?ids=" + k5 + "," + k33), "is_planar"), "none");
    EXPECT_EQ(tally(a, "node_count"), "-") << "numeric rows have no tally";

    EXPECT_EQ(h.get_json("/compare?ids=" + k4, 400)["error"], "InvalidQuery");
    std::string nine = k4;
    for (int i = 0; i < 8; ++i) nine += "," + k4;
    EXPECT_EQ(h.get_json("/compare?ids=" + nine, 400)["error"], "InvalidQuery");
    EXPECT_EQ(h.get_json("/compare?ids=" + k4 + ",01ARZ3NDEKTSV4RRFFQ69G5FAV", 404)["error"], "NotFound");
}

TEST(Service, ZipImportReportsEachFile) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto zip = archive::zip::write({{"a.gml", gml_of(oga::testing::complete(3))},
                                    {"b.col", "p edge 2 1\ne 1 2\n"},
                                    {"c.gml", "graph [ node [ id 1 ] edge [ source 1 target 2 ] ]"}});
    auto r = h.client.Post("/import?tag=batch", h.auth(), zip, "application/zip");
    ASSERT_EQ(r->status, 200) << r->body;
    auto body = Json::parse(r->body);
    EXPECT_EQ(body["committed"], 2);
    EXPECT_EQ(body["failed"], 1);
    for (const auto& item : body["results"]) {
        if (item["filename"] == "c.gml") {
            EXPECT_EQ(item["error"]["kind"], "SyntaxError");
            EXPECT_EQ(item["error"]["line"], 1);
        } else {
            EXPECT_TRUE(item.contains("id"));
        }
    }
    EXPECT_EQ(h.get_json("/search?tag=batch")["total"], 2);
    EXPECT_EQ(h.get_json("/search?name=a")["results"][0]["creator"], "alice");

    EXPECT_EQ(h.client.Post("/import", h.auth(), "PK-not-really", "application/zip")->status, 400);
    EXPECT_EQ(h.svc.archive().record_count(), 2u);
}

TEST(Service, ExportZipRoundTrip) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto a = h.upload(gml_of(oga::testing::complete(4)), "name=a");
    auto b = h.upload(gml_of(oga::testing::cycle(5)), "name=b");
    auto r = h.client.Get("/export?ids=" + a + "," + b + "&format=graphml");
    ASSERT_EQ(r->status, 200) << r->body;
    EXPECT_EQ(r->get_header_value("Content-Type"), "application/zip");
    auto entries = archive::zip::read(r->body);
    std::set<std::string> names;
    for (const auto& e : entries) names.insert(e.name);
    EXPECT_TRUE(names.count("manifest.txt"));
    EXPECT_TRUE(names.count(a + ".graphml"));
    EXPECT_TRUE(names.count(b + ".graphml"));
    EXPECT_EQ(h.client.Get("/export?ids=" + a)->status, 400);
    EXPECT_EQ(h.client.Get("/export?format=gml")->status, 400);
}

TEST(Service, HundredThousandAndOneNodesSkipAnalysis) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    std::string big = "p edge 100001 1\ne 1 2\n";
    auto id = h.upload(big, "name=huge");
    h.svc.worker().drain();
    auto rec = h.get_json("/graphs/" + id);
    EXPECT_EQ(rec["status"], "analysis-skipped");
    EXPECT_EQ(rec["node_count"], 100001);
    EXPECT_EQ(rec["properties"]["node_count"], 100001);
    EXPECT_TRUE(rec["properties"]["is_planar"].is_null());
    EXPECT_EQ(h.client.Get("/graphs/" + id + "/image.svg")->status, 404);
    EXPECT_EQ(h.get_json("/search?all=true")["results"][0]["status"], "analysis-skipped");
}

TEST(Service, MetadataCommentsAndReferences) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto id = h.upload(gml_of(oga::testing::cycle(4)), "name=c4&creation_method=generated&description=square");
    auto rec = h.get_json("/graphs/" + id);
    EXPECT_EQ(rec["metadata"]["creation_method"], "generated");
    EXPECT_EQ(rec["metadata"]["description"], "square");

    auto patch = h.client.Patch("/graphs/" + id + "/metadata", h.auth(),
                                R"({"description":"a square","tags":["Cycle","sparse"]})", "application/json");
    ASSERT_EQ(patch->status, 200) << patch->body;
    auto c = h.client.Post("/graphs/" + id + "/comments", h.auth(), R"({"text":"nice"})", "application/json");
    ASSERT_EQ(c->status, 201) << c->body;
    EXPECT_EQ(Json::parse(c->body)["author"], "alice");
    auto ref = h.client.Post("/graphs/" + id + "/references", h.auth(), R"({"kind":"website","citation_or_url":"https://example.org"})",
                             "application/json");
    ASSERT_EQ(ref->status, 201) << ref->body;

    rec = h.get_json("/graphs/" + id);
    EXPECT_EQ(rec["metadata"]["description"], "a square");
    EXPECT_EQ(rec["metadata"]["tags"].size(), 2u);
    EXPECT_EQ(rec["metadata"]["comments"][0]["text"], "nice");
    EXPECT_EQ(rec["metadata"]["references"][0]["citation_or_url"], "https://example.org");
    EXPECT_EQ(h.get_json("/search?tag=cycle")["total"], 1);

    EXPECT_EQ(h.client.Patch("/graphs/" + id + "/metadata", h.auth(), R"({"name":""})", "application/json")->status, 400);
    EXPECT_EQ(h.client.Patch("/graphs/" + id + "/metadata", h.auth(), "{not Json", "application/json")->status, 400);
    EXPECT_EQ(h.client.Post("/graphs/" + id + "/comments", h.auth(), R"({"text":5})", "application/json")->status, 400);
    EXPECT_EQ(h.client.Patch("/graphs/01ARZ3NDEKTSV4RRFFQ69G5FAV/metadata", h.auth(), R"({"description":"x"})", "application/json")->status,
              404);
}

TEST(Service, DownloadConvertsWithLossReport) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    std::string gml = "graph [\n  node [ id 1 label \"a\" ]\n  node [ id 2 label \"b\" ]\n  edge [ source 1 target 2 weight 2.5 ]\n]\n";
    auto id = h.upload(gml, "name=labelled");
    auto r = h.client.Get("/graphs/" + id + "/download?format=dimacs");
    ASSERT_EQ(r->status, 200) << r->body;
    auto report = Json::parse(r->get_header_value("X-OGA-Loss-Report"));
    std::set<std::string> kinds;
    for (const auto& item : report["dropped_items"]) kinds.insert(item["kind"].get<std::string>());
    EXPECT_TRUE(kinds.count("node-label")) << report.dump();
    EXPECT_EQ(formats::parse(r->body, formats::dimacs).edge_count(), 1u);

    auto same = h.client.Get("/graphs/" + id + "/download?format=gml");
    EXPECT_EQ(same->body, gml);
    EXPECT_EQ(h.client.Get("/graphs/" + id + "/download?format=pdf")->status, 400);
}

TEST(Service, UserCrossingNumber) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto id = h.upload(gml_of(oga::testing::complete(5)), "name=k5");
    h.svc.worker().drain();
    auto ok = h.client.Post("/graphs/" + id + "/properties", h.auth(), R"({"crossing_number":1})", "application/json");
    ASSERT_EQ(ok->status, 200) << ok->body;
    EXPECT_EQ(h.get_json("/graphs/" + id + "/properties")["crossing_number"], 1);
    auto denied = h.client.Post("/graphs/" + id + "/properties", h.auth(), R"({"is_planar":true})", "application/json");
    EXPECT_EQ(denied->status, 403);
    EXPECT_EQ(Json::parse(denied->body)["error"], "FieldNotUserSettable");
    EXPECT_EQ(h.client.Post("/graphs/" + id + "/properties", h.auth(), R"({"colour":1})", "application/json")->status, 400);
    EXPECT_EQ(h.get_json("/graphs/" + id)["properties"]["is_planar"], false);
}

TEST(Service, DeletedGraphsAreGone) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto id = h.upload(gml_of(oga::testing::complete(3)), "name=k3&tag=t");
    ASSERT_EQ(h.client.Delete("/graphs/" + id, h.auth())->status, 200);
    EXPECT_EQ(h.get_json("/graphs/" + id, 410)["deleted_at"].is_string(), true);
    EXPECT_EQ(h.get_json("/search?tag=t")["total"], 0);
    EXPECT_EQ(h.client.Post("/graphs/" + id + "/comments", h.auth(), R"({"text":"x"})", "application/json")->status, 410);
    EXPECT_EQ(h.svc.worker().drain(), 1u) << "the job is consumed without work";
}

TEST(Service, Collections) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    auto a = h.upload(gml_of(oga::testing::complete(3)), "name=a");
    auto r = h.client.Post("/collections", h.auth(), R"({"name":"triangles","description":"small"})", "application/json");
    ASSERT_EQ(r->status, 201) << r->body;
    std::string cid = Json::parse(r->body)["id"];
    auto add = [&](const std::string& id) {
        return h.client.Post("/collections/" + cid + "/members", h.auth(), Json{{"id", id}}.dump(), "application/json")->status;
    };
    EXPECT_EQ(add(a), 201);
    EXPECT_EQ(add(a), 409);
    EXPECT_EQ(add("01ARZ3NDEKTSV4RRFFQ69G5FAV"), 404);
    EXPECT_EQ(h.get_json("/collections/" + cid)["members"], Json::array({a}));
    EXPECT_EQ(h.get_json("/collections").size(), 1u);
    EXPECT_EQ(h.get_json("/collections/nope", 404)["error"], "NotFound");
}

TEST(Service, Healthz) {
    TempDir dir;
    Harness h(test_config(dir.path()));
    EXPECT_EQ(h.get_json("/healthz")["status"], "ok");
}

TEST(Worker, ReprocessingIsIdempotent) {
    TempDir dir;
    archive::Archive store(dir.path());
    Metadata m;
    m.name = "k4";
    m.creator = "t";
    auto id = store.put_graph(gml_of(oga::testing::complete(4)), formats::gml, m);
    WorkerConfig cfg;
    auto first = process_record(store, id, cfg);
    EXPECT_EQ(first.status, archive::Status::analyzed);
    EXPECT_TRUE(first.layout);
    auto before = store.get_record(id);
    auto svg = store.get_svg(id);

    auto again = process_record(store, id, cfg);
    EXPECT_EQ(again.status, archive::Status::analyzed);
    store.enqueue_job(id);
    Worker w(store, cfg);
    EXPECT_EQ(w.drain(), 2u) << "the original job and the duplicate";
    auto after = store.get_record(id);
    EXPECT_EQ(after.properties, before.properties);
    EXPECT_EQ(after.layout, before.layout);
    EXPECT_EQ(store.get_svg(id), svg);
    EXPECT_EQ(store.pending_job_count(), 0u);
}

TEST(Worker, SameResultWhenRunTwiceFromScratch) {
    TempDir d1, d2;
    archive::Archive s1(d1.path()), s2(d2.path());
    Metadata m;
    m.name = "g";
    m.creator = "t";
    std::mt19937_64 rng(5);
    auto bytes = gml_of(oga::testing::random_graph(rng, 40, 0.1));
    auto id1 = s1.put_graph(bytes, formats::gml, m);
    auto id2 = s2.put_graph(bytes, formats::gml, m);
    Worker(s1, {}).drain();
    Worker(s2, {}).drain();
    EXPECT_EQ(s1.get_record(id1).properties, s2.get_record(id2).properties);
    EXPECT_EQ(s1.get_svg(id1), s2.get_svg(id2));
}

TEST(Worker, FailureIsRecorded) {
    TempDir dir;
    archive::Archive store(dir.path());
    Metadata m;
    m.name = "k4";
    m.creator = "t";
    auto id = store.put_graph(gml_of(oga::testing::complete(4)), formats::gml, m);
    WorkerConfig cfg;
    cfg.layout_iterations = 0;  // layout rejects this
    auto out = process_record(store, id, cfg);
    EXPECT_EQ(out.status, archive::Status::analysis_failed);
    auto rec = store.get_record(id);
    EXPECT_EQ(rec.status, archive::Status::analysis_failed);
    EXPECT_FALSE(rec.status_message.empty());
}

TEST(SearchParams, MapsToCriteria) {
    std::multimap<std::string, std::string> p{{"tag", "a"}, {"min_nodes", "3"}, {"max_nodes", "9"}, {"planar", "true"}, {"page", "2"}};
    auto r = search_request_from_params(p);
    EXPECT_EQ(r.page, 2u);
    ASSERT_EQ(r.query.criteria.size(), 3u) << "min and max of one property share a criterion";
    auto range = std::get<archive::NumericRange>(r.query.criteria[2]);
    EXPECT_EQ(range.property, "node_count");
    EXPECT_EQ(range.low, 3.0);
    EXPECT_EQ(range.high, 9.0);
    EXPECT_THROW(search_request_from_params({{"page", "0"}}), archive::InvalidQuery);
    EXPECT_THROW(search_request_from_params({{"is_planar", "yes"}}), archive::InvalidQuery);
    EXPECT_NO_THROW(search_request_from_params({{"is_planar", "true"}}));
    EXPECT_NO_THROW(search_request_from_params({{"min_vertex_connectivity", "2"}}));

    auto day = search_request_from_params({{"to", "2024-03-01"}});
    auto to = std::get<archive::UploadedBetween>(day.query.criteria[0]).to;
    EXPECT_EQ(format_timestamp(*to), "2024-03-01T23:59:59.999Z");
}

TEST(Compare, PureTally) {
    auto props = [](const Graph& g) { return analysis::analyze(g); };
    auto view = compare_properties({{"a", props(oga::testing::complete(4))}, {"b", props(oga::testing::complete(5))}});
    for (const auto& row : view.rows) {
        if (row.property == "is_planar") {
            EXPECT_EQ(row.tally, Tally::some);
        } else if (row.property == "has_self_loops") {
            EXPECT_EQ(row.tally, Tally::none);
        } else if (row.property == "is_connected") {
            EXPECT_EQ(row.tally, Tally::all);
        } else if (row.property == "node_count") {
            EXPECT_EQ(row.values, (std::vector<Json>{4, 5}));
        }
    }
}

TEST(Config, ListenAddressAndEnvironment) {
    EXPECT_EQ(parse_listen_addr("0.0.0.0:9000"), (std::pair<std::string, int>{"0.0.0.0", 9000}));
    EXPECT_EQ(parse_listen_addr("8081"), (std::pair<std::string, int>{"127.0.0.1", 8081}));
    EXPECT_EQ(parse_listen_addr("[::1]:80"), (std::pair<std::string, int>{"::1", 80}));
    EXPECT_THROW(parse_listen_addr("host:http"), InvalidConfig);
    EXPECT_THROW(parse_listen_addr("host:70000"), InvalidConfig);

    ::setenv("OGA_VERTEX_THRESHOLD", "500", 1);
    ::setenv("OGA_OPEN_MODE", "true", 1);
    ::setenv("OGA_LISTEN_ADDR", "127.0.0.1:0", 1);
    auto cfg = config_from_env();
    EXPECT_EQ(cfg.worker.analysis.vertex_threshold, 500u);
    EXPECT_TRUE(cfg.open_mode);
    EXPECT_EQ(cfg.listen_port, 0);
    ::setenv("OGA_VERTEX_THRESHOLD", "0", 1);
    EXPECT_THROW(config_from_env(), InvalidConfig);
    ::setenv("OGA_VERTEX_THRESHOLD", "-4", 1);
    EXPECT_THROW(config_from_env(), InvalidConfig);
    ::unsetenv("OGA_VERTEX_THRESHOLD");
    ::unsetenv("OGA_OPEN_MODE");
    ::unsetenv("OGA_LISTEN_ADDR");
}
