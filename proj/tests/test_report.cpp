#include <doctest.h>

#include "docrebench/report.hpp"

using namespace docrebench;

namespace {

ScoreRow row(const std::string& id, const std::string& domain, double r, double p,
             double f, double cer, double wer) {
    ScoreRow s;
    s.image_id = id;
    s.domain = domain;
    s.recall = r;
    s.precision = p;
    s.f = f;
    s.cer = cer;
    s.wer = wer;
    return s;
}

}  // namespace

TEST_CASE("csv round trip") {
    std::vector<ScoreRow> rows = {row("img1", "Book", 0.5, 0.25, 1.0 / 3, 0.125, 0.75),
                                  row("img2", "Old Newspaper", 0.09, 0.27, 0.14, 1.13, 1.28)};
    rows[0].tp = 5;
    rows[0].fp = 15;
    rows[0].fn = 5;
    rows[0].char_weight = 120.5;
    rows[0].word_weight = 30;
    std::string csv = scores_to_csv(rows);
    std::vector<std::string> errors;
    auto back = scores_from_csv(csv, &errors);
    CHECK(errors.empty());
    REQUIRE(back.size() == 2);
    CHECK(back[0].image_id == "img1");
    CHECK(back[0].tp == 5);
    CHECK(back[0].f == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(back[0].char_weight == 120.5);
    CHECK(back[1].cer == 1.13);
    CHECK(scores_to_csv(back) == csv);
}

TEST_CASE("csv escaping handles commas and quotes in ids") {
    std::vector<ScoreRow> rows = {row("img,with\"comma", "Dom,ain", 1, 1, 1, 0, 0)};
    std::vector<std::string> errors;
    auto back = scores_from_csv(scores_to_csv(rows), &errors);
    CHECK(errors.empty());
    REQUIRE(back.size() == 1);
    CHECK(back[0].image_id == "img,with\"comma");
    CHECK(back[0].domain == "Dom,ain");
}

TEST_CASE("malformed rows are reported with line numbers") {
    std::string csv =
        "image_id,domain,tp,fp,fn,precision,recall,f,cer,wer,char_weight,word_weight\n"
        "a,Book,1,2,3,0.5,0.5,0.5,0.1,0.2,10,5\n"
        "broken,row,only,four\n"
        "b,Book,1,2,3,not_a_number,0.5,0.5,0.1,0.2,10,5\n"
        "c,Book,1,2,3,0.5,0.5,0.5,0.1,0.2,10,5\n";
    std::vector<std::string> errors;
    auto rows = scores_from_csv(csv, &errors);
    CHECK(rows.size() == 2);
    REQUIRE(errors.size() == 2);
    CHECK(errors[0].find("line 3") != std::string::npos);
    CHECK(errors[1].find("line 4") != std::string::npos);
}

TEST_CASE("aggregation groups by domain with a per-image average") {
    std::vector<ScoreRow> rows = {
        row("a", "Book", 1.0, 1.0, 1.0, 0.0, 0.0),
        row("b", "Book", 0.0, 0.0, 0.0, 1.0, 1.0),
        row("c", "Magazine", 0.4, 0.4, 0.4, 0.5, 0.5),
    };
    auto table = aggregate_scores(rows);
    REQUIRE(table.domains.size() == 2);
    CHECK(table.domains[0].domain == "Book");
    CHECK(table.domains[0].n_images == 2);
    CHECK(table.domains[0].f == doctest::Approx(0.5));
    CHECK(table.domains[1].domain == "Magazine");

    // cross-domain row weights images, not domains:
    // mean f = (1.0 + 0.0 + 0.4) / 3, not (0.5 + 0.4) / 2
    CHECK(table.per_image_average.n_images == 3);
    CHECK(table.per_image_average.f == doctest::Approx((1.0 + 0.0 + 0.4) / 3));
}

TEST_CASE("two images average to the midpoint") {
    auto table = aggregate_scores(
        {row("a", "X", 0.4, 0.4, 0.4, 0.4, 0.4), row("b", "X", 0.6, 0.6, 0.6, 0.6, 0.6)});
    CHECK(table.per_image_average.f == doctest::Approx(0.5));
}

TEST_CASE("markdown renders at two decimals") {
    auto table = aggregate_scores({row("a", "Old Newspaper", 0.09, 0.27, 0.14, 1.13, 1.28)});
    std::string md = render_markdown(table);
    CHECK(md.find("| Old Newspaper | 1 | 0.09 | 0.27 | 0.14 | 1.13 | 1.28 |") !=
          std::string::npos);
    CHECK(md.find("| Per Image Average | 1 |") != std::string::npos);

    std::string csv = render_csv(table);
    CHECK(csv.find("Old Newspaper,1,0.09,0.27,0.14,1.13,1.28") != std::string::npos);

    std::string json = render_json(table);
    CHECK(json.find("\"per_image_average\"") != std::string::npos);
}
