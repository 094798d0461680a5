"""`python -m topicguard` entry point."""

from topicguard.cli import main

if __name__ == "__main__":
    main()
