//! Two intrusive doubly-linked lists over edge indices sharing one link
//! table, so an edge can be found, removed or moved in O(1) from its
//! handle alone.

use crate::dcel::EdgeId;

const NIL: u32 = u32::MAX;

/// Which list an edge currently belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum List {
    /// Untested edges.
    Lue,
    /// Tested edges that failed the link condition.
    Lte,
}

impl List {
    fn slot(self) -> usize {
        match self {
            List::Lue => 0,
            List::Lte => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Worklists {
    prev: Vec<u32>,
    next: Vec<u32>,
    owner: Vec<Option<List>>,
    head: [u32; 2],
    tail: [u32; 2],
    len: [usize; 2],
}

impl Worklists {
    pub fn new(n_edges: usize) -> Self {
        Worklists {
            prev: vec![NIL; n_edges],
            next: vec![NIL; n_edges],
            owner: vec![None; n_edges],
            head: [NIL; 2],
            tail: [NIL; 2],
            len: [0; 2],
        }
    }

    #[inline]
    pub fn owner(&self, e: EdgeId) -> Option<List> {
        self.owner[e.index()]
    }

    #[inline]
    pub fn len(&self, list: List) -> usize {
        self.len[list.slot()]
    }

    #[inline]
    pub fn is_empty(&self, list: List) -> bool {
        self.len[list.slot()] == 0
    }

    #[inline]
    pub fn front(&self, list: List) -> Option<EdgeId> {
        let h = self.head[list.slot()];
        (h != NIL).then_some(EdgeId(h))
    }

    pub fn push_front(&mut self, list: List, e: EdgeId) {
        debug_assert!(self.owner[e.index()].is_none(), "{e:?} already listed");
        let s = list.slot();
        let i = e.0;
        self.prev[e.index()] = NIL;
        self.next[e.index()] = self.head[s];
        if self.head[s] != NIL {
            self.prev[self.head[s] as usize] = i;
        } else {
            self.tail[s] = i;
        }
        self.head[s] = i;
        self.owner[e.index()] = Some(list);
        self.len[s] += 1;
    }

    pub fn push_back(&mut self, list: List, e: EdgeId) {
        debug_assert!(self.owner[e.index()].is_none(), "{e:?} already listed");
        let s = list.slot();
        let i = e.0;
        self.next[e.index()] = NIL;
        self.prev[e.index()] = self.tail[s];
        if self.tail[s] != NIL {
            self.next[self.tail[s] as usize] = i;
        } else {
            self.head[s] = i;
        }
        self.tail[s] = i;
        self.owner[e.index()] = Some(list);
        self.len[s] += 1;
    }

    /// Unlinks `e` from whichever list holds it. Returns that list.
    pub fn remove(&mut self, e: EdgeId) -> Option<List> {
        let list = self.owner[e.index()]?;
        let s = list.slot();
        let (p, n) = (self.prev[e.index()], self.next[e.index()]);
        if p != NIL {
            self.next[p as usize] = n;
        } else {
            self.head[s] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        } else {
            self.tail[s] = p;
        }
        self.prev[e.index()] = NIL;
        self.next[e.index()] = NIL;
        self.owner[e.index()] = None;
        self.len[s] -= 1;
        Some(list)
    }

    pub fn pop_front(&mut self, list: List) -> Option<EdgeId> {
        let e = self.front(list)?;
        self.remove(e);
        Some(e)
    }

    pub fn move_to_front(&mut self, list: List, e: EdgeId) {
        self.remove(e);
        self.push_front(list, e);
    }

    pub fn move_to_back(&mut self, list: List, e: EdgeId) {
        self.remove(e);
        self.push_back(list, e);
    }

    pub fn clear(&mut self, list: List) {
        while self.pop_front(list).is_some() {}
    }

    pub fn iter(&self, list: List) -> impl Iterator<Item = EdgeId> + '_ {
        let mut cur = self.head[list.slot()];
        std::iter::from_fn(move || {
            if cur == NIL {
                return None;
            }
            let e = EdgeId(cur);
            cur = self.next[cur as usize];
            Some(e)
        })
    }
}
