//! Turn raw web and social records into country-labeled documents.
//!
//! Web pages are located by their domain suffix (generic suffixes like
//! `com` are excluded) and must clear a minimum length after boilerplate
//! removal. Social posts are located by the nearest city within 50 km of
//! their coordinates, keeping only posts long enough and already tagged
//! as English.

use dialectid::ingest::{CityIndex, Ingestor, SocialRecord, TldTable, WebRecord};

fn main() -> anyhow::Result<()> {
    let tlds = TldTable::builtin();
    let cities = CityIndex::from_csv_reader(
        "name,country,lat,lon\n\
         London,GB,51.5074,-0.1278\n\
         New York,US,40.7128,-74.0060\n\
         Sydney,AU,-33.8688,151.2093\n"
            .as_bytes(),
    )?;
    let ingestor = Ingestor::new(tlds, cities);

    let body = "The committee met on Thursday evening to review the draft \
                schedule for the coming season and agreed that the regional \
                rounds will start in March, with the finals held over the \
                long weekend as usual, pending ground availability and the \
                usual sign-off from the council in the new year.";
    let pages = [
        ("national suffix", WebRecord {
            source_id: "forum.example.au".into(),
            domain_suffix: "au".into(),
            month: "2019-04".parse()?,
            html: format!("<html><p>{body}</p><p>All rights reserved.</p></html>"),
        }),
        ("generic suffix", WebRecord {
            source_id: "blog.example.com".into(),
            domain_suffix: "com".into(),
            month: "2019-04".parse()?,
            html: format!("<p>{body}</p>"),
        }),
        ("too short", WebRecord {
            source_id: "stub.example.nz".into(),
            domain_suffix: "nz".into(),
            month: "2019-04".parse()?,
            html: "<p>Page moved.</p>".into(),
        }),
    ];
    println!("web records:");
    for (label, page) in &pages {
        match ingestor.web_document(page) {
            Some(doc) => println!(
                "  [{label}] .{} -> {} ({} words, boilerplate dropped)",
                page.domain_suffix, doc.country, doc.word_count
            ),
            None => println!("  [{label}] .{} -> rejected", page.domain_suffix),
        }
    }

    let chatter = "absolutely chuffed with the result tonight, what a finish \
                   that was after extra time";
    let posts = [
        ("near London", SocialRecord {
            post_id: "p1".into(),
            lat: 51.50,
            lon: -0.12,
            month: "2019-04".parse()?,
            text: chatter.into(),
            language: Some("en".into()),
        }),
        ("no city in range", SocialRecord {
            post_id: "p2".into(),
            lat: 48.8566, // Paris is not in the gazetteer above
            lon: 2.3522,
            month: "2019-04".parse()?,
            text: chatter.into(),
            language: Some("en".into()),
        }),
        ("not English", SocialRecord {
            post_id: "p3".into(),
            lat: -33.87,
            lon: 151.21,
            month: "2019-04".parse()?,
            text: "ce soir on mange dehors pour une fois, la terrasse est enfin ouverte".into(),
            language: Some("fr".into()),
        }),
    ];
    println!("social records:");
    for (label, post) in &posts {
        match ingestor.social_document(post) {
            Some(doc) => println!(
                "  [{label}] ({:.2}, {:.2}) -> {}",
                post.lat, post.lon, doc.country
            ),
            None => println!("  [{label}] ({:.2}, {:.2}) -> rejected", post.lat, post.lon),
        }
    }
    Ok(())
}
