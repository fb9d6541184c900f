use indexmap::IndexMap;
use std::sync::Arc;

/// Least-recently-used map: touching an entry moves it to the back, and
/// inserting past capacity evicts from the front.
pub struct Lru<V> {
    cap: usize,
    map: IndexMap<String, Arc<V>>,
}

impl<V> Lru<V> {
    pub fn new(cap: usize) -> Self {
        assert!(cap > 0);
        Lru {
            cap,
            map: IndexMap::new(),
        }
    }

    pub fn get(&mut self, k: &str) -> Option<Arc<V>> {
        let i = self.map.get_index_of(k)?;
        let last = self.map.len() - 1;
        self.map.move_index(i, last);
        self.map.get_index(last).map(|(_, v)| v.clone())
    }

    pub fn insert(&mut self, k: String, v: V) {
        self.map.shift_remove(&k);
        self.map.insert(k, Arc::new(v));
        while self.map.len() > self.cap {
            self.map.shift_remove_index(0);
        }
    }

    pub fn remove(&mut self, k: &str) -> bool {
        self.map.shift_remove(k).is_some()
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.map.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_least_recently_used() {
        let mut l = Lru::new(2);
        l.insert("a".into(), 1);
        l.insert("b".into(), 2);
        l.get("a");
        l.insert("c".into(), 3);
        assert!(l.get("b").is_none());
        assert_eq!(*l.get("a").unwrap(), 1);
        assert_eq!(l.len(), 2);
    }
}
