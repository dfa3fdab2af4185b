//! Name-keyed registries of interchangeable strategies.

use crate::error::{Error, Result};

/// Anything that can be looked up by a stable name.
pub trait Named {
    fn name(&self) -> &'static str;

    /// One-line human readable description.
    fn describe(&self) -> String {
        self.name().to_string()
    }
}

/// Ordered collection of boxed strategies of one kind.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds a strategy. Panics on a duplicate name, which is a programming
    /// error rather than a runtime condition.
    pub fn register(&mut self, entry: Box<T>) -> &mut Self {
        assert!(
            self.entries.iter().all(|e| e.name() != entry.name()),
            "duplicate {} `{}`",
            self.kind,
            entry.name()
        );
        self.entries.push(entry);
        self
    }

    pub fn with(mut self, entry: Box<T>) -> Self {
        self.register(entry);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(Box::as_ref)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(Box::as_ref)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello;
    struct Hi;

    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }

    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }

    impl Named for Hi {
        fn name(&self) -> &'static str {
            "hi"
        }
    }

    impl Greeter for Hi {
        fn greet(&self) -> String {
            "hi!".into()
        }
    }

    #[test]
    fn lookup_by_name() {
        let reg = Registry::<dyn Greeter>::new("greeter")
            .with(Box::new(Hello))
            .with(Box::new(Hi));
        assert_eq!(reg.get("hi").unwrap().greet(), "hi!");
        assert_eq!(reg.names(), vec!["hello", "hi"]);
        let err = reg.get("hey").err().unwrap();
        assert!(err.to_string().contains("available: hello, hi"));
    }

    #[test]
    #[should_panic(expected = "duplicate greeter")]
    fn duplicate_names_panic() {
        let _ = Registry::<dyn Greeter>::new("greeter")
            .with(Box::new(Hello))
            .with(Box::new(Hello));
    }
}
