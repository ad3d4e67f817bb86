//! The six reference queries, stored byte for byte as originally written.

pub const Q1: &str = include_str!("../resources/queries/q1.sql");
pub const Q2: &str = include_str!("../resources/queries/q2.sql");
pub const Q3: &str = include_str!("../resources/queries/q3.sql");
pub const Q4: &str = include_str!("../resources/queries/q4.sql");
pub const Q5: &str = include_str!("../resources/queries/q5.sql");
pub const Q6: &str = include_str!("../resources/queries/q6.sql");

pub const ALL: [&str; 6] = [Q1, Q2, Q3, Q4, Q5, Q6];

/// Query `n` for `n` in 1..=6.
pub fn reference_query(n: usize) -> Option<&'static str> {
    n.checked_sub(1).and_then(|i| ALL.get(i)).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_texts() {
        assert_eq!(
            Q1,
            "SELECT COUNT(Actor_id), Nationality\nFROM Actors\nGROUP BY Nationality\nORDER BY COUNT(Actor_id) DESC;"
        );
        assert_eq!(
            Q2,
            "SELECT b.`show name`, a.`IMDB rating`\nFROM `Critics_Rating` a\nJOIN `Show_id-name` b\nON a.show_id = b.show_id\nWHERE `IMDB rating` = 10;"
        );
        assert_eq!(
            Q3,
            "SELECT a.`Show Name`, b. `Writer`, b.`Release year`\nFROM `Show_id-name` a\nJOIN `Collections_of_shows` b\nON a.`Show_id` = b.`Show_id`\nWHERE b.`Writer` = 'S.S. Wilson'"
        );
        assert_eq!(
            Q4,
            "SELECT b.`Platform name`, SUM(`views/mo`) AS 'TOTAL'\nFROM Statistics a\nJOIN Platforms b\nON a.`Platform_id` = b.`Platform_id`\nGROUP BY b.`Platform name`;"
        );
        assert_eq!(
            Q5,
            "SELECT b.Show_id,a.`Show Name`,c.Production_Name ,b.Seasons,b.Episodes\nFROM `Show_id-name` a\nJOIN `TV_series` b\nON a.Show_id = b.Show_id\nJOIN Productions c\nON b.Production_id = c.Production_id\nWHERE Seasons<2\nAND Episodes <6\nORDER BY b.Seasons;"
        );
        assert_eq!(
            Q6,
            "SELECT a.`Show Name`,b. Writer, b.`Release year`, b.Genre,e.`Actor name`\nFROM `Show_id-name` a\nJOIN `Collections_of_shows` b ON a.Show_id = b.Show_id\nJOIN Director c ON a.Show_id = c.Show_id\nJOIN `Actor_id-Show_id` d ON a.Show_id = d.Show_id\nJOIN Actors e ON d.Actor_id = e.Actor_id\nJOIN PG_Rating f ON a.Show_id = f.Show_id\nWHERE Age <= 40\nAND Genre = 'Adventure'\nAND `U/A` = 1\nAND Gender = 'Male'\nORDER BY a.Show_id"
        );
    }

    #[test]
    fn numbering() {
        assert_eq!(reference_query(0), None);
        assert_eq!(reference_query(3), Some(Q3));
        assert_eq!(reference_query(7), None);
    }
}
