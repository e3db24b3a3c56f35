use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::hash::Hash;

/// Ordering key: frontal entries first, then larger values; ties go to the
/// older entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Priority {
    pub frontal: bool,
    pub value: f64,
}

#[derive(Debug)]
struct Entry<K> {
    prio: Priority,
    stamp: u64,
    key: K,
}

impl<K> PartialEq for Entry<K> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl<K> Eq for Entry<K> {}

impl<K> PartialOrd for Entry<K> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<K> Ord for Entry<K> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.prio
            .frontal
            .cmp(&o.prio.frontal)
            .then(self.prio.value.total_cmp(&o.prio.value))
            .then(o.stamp.cmp(&self.stamp))
    }
}

/// Max-priority queue with lazy invalidation: re-pushing a key supersedes
/// its earlier entry, and removed keys are skipped when popped.
#[derive(Debug)]
pub struct RefineQueue<K: Hash + Eq + Copy> {
    heap: BinaryHeap<Entry<K>>,
    live: HashMap<K, u64>,
    stamp: u64,
}

impl<K: Hash + Eq + Copy> Default for RefineQueue<K> {
    fn default() -> Self {
        RefineQueue { heap: BinaryHeap::new(), live: HashMap::new(), stamp: 0 }
    }
}

impl<K: Hash + Eq + Copy> RefineQueue<K> {
    pub fn push(&mut self, key: K, prio: Priority) {
        self.stamp += 1;
        self.live.insert(key, self.stamp);
        self.heap.push(Entry { prio, stamp: self.stamp, key });
    }

    pub fn remove(&mut self, key: &K) {
        self.live.remove(key);
    }

    pub fn contains(&self, key: &K) -> bool {
        self.live.contains_key(key)
    }

    pub fn pop(&mut self) -> Option<(K, Priority)> {
        while let Some(e) = self.heap.pop() {
            if self.live.get(&e.key) == Some(&e.stamp) {
                self.live.remove(&e.key);
                return Some((e.key, e.prio));
            }
        }
        None
    }

    /// Best live entry without removing it.
    pub fn peek(&mut self) -> Option<(K, Priority)> {
        while let Some(e) = self.heap.peek() {
            if self.live.get(&e.key) == Some(&e.stamp) {
                return Some((e.key, e.prio));
            }
            self.heap.pop();
        }
        None
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
        self.live.clear();
    }
}
