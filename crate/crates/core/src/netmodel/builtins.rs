use super::{parse_network, Network};

/// Names accepted by [`builtin_case`].
pub const BUILTIN_CASES: [&str; 5] = ["ieee3", "ieee5", "ieee9", "ieee14", "rts96-area4"];

/// `.dgnet` source of a builtin case.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "ieee3" => include_str!("cases/ieee3.dgnet"),
        "ieee5" => include_str!("cases/ieee5.dgnet"),
        "ieee9" => include_str!("cases/ieee9.dgnet"),
        "ieee14" => include_str!("cases/ieee14.dgnet"),
        "rts96-area4" => include_str!("cases/rts96-area4.dgnet"),
        _ => return None,
    })
}

pub fn builtin_case(name: &str) -> Option<Network> {
    builtin_text(name).map(|text| parse_network(text).expect("builtin cases are well-formed").network)
}
