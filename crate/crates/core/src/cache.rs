use std::collections::HashMap;
use std::hash::Hash;
use std::sync::RwLock;

/// Concurrent memo table. Reads take a shared lock; a miss computes the value
/// outside any lock and inserts it, so two workers racing on the same key
/// both compute it and the first insert wins.
pub(crate) struct Memo<K, V> {
    map: RwLock<HashMap<K, V>>,
}

impl<K: Eq + Hash, V: Clone> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo {
            map: RwLock::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_insert_with(&self, key: K, f: impl FnOnce() -> V) -> V {
        if let Some(v) = self.map.read().unwrap().get(&key) {
            return v.clone();
        }
        let v = f();
        self.map.write().unwrap().entry(key).or_insert(v).clone()
    }
}
