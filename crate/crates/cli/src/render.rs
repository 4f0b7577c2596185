//! Flat text rendering of a report: one `path = value` line per scalar,
//! in key order, so runs diff cleanly against golden files.

use serde_json::Value;

pub fn table(v: &Value) -> String {
    let mut lines = Vec::new();
    walk(v, "", &mut lines);
    lines.join("\n")
}

fn walk(v: &Value, path: &str, lines: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                lines.push(format!("{path} = {{}}"));
            }
            for (k, inner) in map {
                let next = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(inner, &next, lines);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                lines.push(format!("{path} = []"));
            }
            for (i, inner) in items.iter().enumerate() {
                walk(inner, &format!("{path}[{i}]"), lines);
            }
        }
        scalar => lines.push(format!("{path} = {scalar}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn scalars_flatten_in_key_order() {
        let v = json!({"b": [1, 2], "a": {"x": true, "empty": []}, "s": "hi"});
        assert_eq!(
            table(&v),
            "a.empty = []\na.x = true\nb[0] = 1\nb[1] = 2\ns = \"hi\""
        );
    }
}
