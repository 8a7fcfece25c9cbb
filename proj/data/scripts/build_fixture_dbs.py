#!/usr/bin/env python3
"""Regenerates the SQLite databases used by the Spider-style fixture corpus.

Output is deterministic: rows are fixed literals, so re-running the script
produces databases with identical contents.

    python3 data/scripts/build_fixture_dbs.py data/corpora/spider_fixture/database
"""

import os
import sqlite3
import sys

DATABASES = {
    "network_1": [
        """CREATE TABLE Highschooler (ID INTEGER PRIMARY KEY, name TEXT, grade INTEGER)""",
        """CREATE TABLE Friend (student_id INTEGER, friend_id INTEGER,
               PRIMARY KEY (student_id, friend_id))""",
        """CREATE TABLE Likes (student_id INTEGER, liked_id INTEGER,
               PRIMARY KEY (student_id, liked_id))""",
        ("Highschooler", [
            (1510, "Jordan", 9), (1689, "Gabriel", 9), (1381, "Tiffany", 9),
            (1709, "Cassandra", 9), (1101, "Haley", 10), (1782, "Andrew", 10),
            (1468, "Kris", 10), (1641, "Brittany", 10), (1247, "Alexis", 11),
            (1316, "Austin", 11), (1911, "Gabriel", 11), (1501, "Jessica", 11),
            (1304, "Jordan", 12), (1025, "John", 12), (1934, "Kyle", 12),
            (1661, "Logan", 12),
        ]),
        ("Friend", [
            (1510, 1381), (1510, 1689), (1689, 1709), (1381, 1247), (1709, 1247),
            (1689, 1782), (1782, 1468), (1782, 1316), (1782, 1304), (1468, 1101),
            (1468, 1641), (1101, 1641), (1247, 1911), (1247, 1501), (1911, 1501),
            (1501, 1934), (1316, 1934), (1934, 1304), (1304, 1661), (1661, 1025),
        ]),
        ("Likes", [
            (1689, 1709), (1709, 1689), (1782, 1709), (1911, 1247), (1247, 1468),
            (1641, 1468), (1316, 1304), (1501, 1934), (1934, 1501), (1025, 1101),
        ]),
    ],
    "world_1": [
        """CREATE TABLE country (Code TEXT PRIMARY KEY, Name TEXT, Continent TEXT,
               Region TEXT, Population INTEGER, SurfaceArea REAL, LifeExpectancy REAL)""",
        """CREATE TABLE countrylanguage (CountryCode TEXT, Language TEXT, IsOfficial TEXT,
               Percentage REAL, PRIMARY KEY (CountryCode, Language))""",
        """CREATE TABLE city (ID INTEGER PRIMARY KEY, Name TEXT, CountryCode TEXT,
               District TEXT, Population INTEGER)""",
        ("country", [
            ("ARG", "Argentina", "South America", "South America", 37032000, 2780400.0, 75.1),
            ("BRA", "Brazil", "South America", "South America", 170115000, 8547403.0, 62.9),
            ("ESP", "Spain", "Europe", "Southern Europe", 39441700, 505992.0, 78.8),
            ("MEX", "Mexico", "North America", "Central America", 98881000, 1958201.0, 71.5),
            ("USA", "United States", "North America", "North America", 278357000, 9363520.0, 77.1),
            ("CAN", "Canada", "North America", "North America", 31147000, 9970610.0, 79.4),
            ("FRA", "France", "Europe", "Western Europe", 59225700, 551500.0, 78.8),
            ("AND", "Andorra", "Europe", "Southern Europe", 78000, 468.0, 83.5),
            ("PER", "Peru", "South America", "South America", 25662000, 1285216.0, 70.0),
            ("CHE", "Switzerland", "Europe", "Western Europe", 7160400, 41284.0, 79.6),
        ]),
        ("countrylanguage", [
            ("ARG", "Spanish", "T", 96.8), ("ARG", "Italian", "F", 1.7),
            ("BRA", "Portuguese", "T", 97.5), ("BRA", "German", "F", 0.5),
            ("ESP", "Spanish", "T", 74.4), ("ESP", "Catalan", "F", 16.9),
            ("ESP", "Galecian", "F", 6.4),
            ("MEX", "Spanish", "T", 92.1), ("MEX", "Nahuatl", "F", 1.8),
            ("USA", "English", "T", 86.2), ("USA", "Spanish", "F", 7.5),
            ("CAN", "English", "T", 60.4), ("CAN", "French", "T", 23.4),
            ("FRA", "French", "T", 93.6), ("FRA", "Arabic", "F", 2.5),
            ("AND", "Spanish", "F", 44.6), ("AND", "Catalan", "T", 32.3),
            ("PER", "Spanish", "T", 79.8), ("PER", "Quechua", "T", 16.4),
            ("CHE", "German", "T", 63.6), ("CHE", "French", "T", 19.2),
            ("CHE", "Italian", "T", 7.7),
        ]),
        ("city", [
            (1, "Buenos Aires", "ARG", "Distrito Federal", 2982146),
            (2, "Cordoba", "ARG", "Cordoba", 1157507),
            (3, "Sao Paulo", "BRA", "Sao Paulo", 9968485),
            (4, "Rio de Janeiro", "BRA", "Rio de Janeiro", 5598953),
            (5, "Madrid", "ESP", "Madrid", 2879052),
            (6, "Barcelona", "ESP", "Katalonia", 1503451),
            (7, "Ciudad de Mexico", "MEX", "Distrito Federal", 8591309),
            (8, "New York", "USA", "New York", 8008278),
            (9, "Los Angeles", "USA", "California", 3694820),
            (10, "Toronto", "CAN", "Ontario", 688275),
            (11, "Paris", "FRA", "Ile-de-France", 2125246),
            (12, "Andorra la Vella", "AND", "Andorra la Vella", 21189),
            (13, "Lima", "PER", "Lima", 6464693),
            (14, "Zurich", "CHE", "Zurich", 336800),
        ]),
    ],
    "voter_1": [
        """CREATE TABLE area_code_state (area_code INTEGER PRIMARY KEY, state TEXT)""",
        """CREATE TABLE contestants (contestant_number INTEGER PRIMARY KEY,
               contestant_name TEXT)""",
        """CREATE TABLE votes (vote_id INTEGER PRIMARY KEY, phone_number INTEGER,
               state TEXT, contestant_number INTEGER, created TEXT)""",
        ("area_code_state", [
            (201, "NJ"), (212, "NY"), (415, "CA"), (510, "CA"), (617, "MA"),
            (713, "TX"),
        ]),
        ("contestants", [
            (1, "Edwina Burnam"), (2, "Tabatha Gehling"), (3, "Kelly Clauss"),
            (4, "Jessie Alloway"), (5, "Alana Bregman"),
        ]),
        ("votes", [
            (1, 7182887233, "NY", 2, "2018-03-09 19:03:21"),
            (2, 7148407040, "NY", 3, "2018-03-09 19:03:36"),
            (3, 6209389516, "CA", 2, "2018-03-09 19:03:39"),
            (4, 5112677315, "NJ", 5, "2018-03-09 19:03:42"),
            (5, 6175550101, "MA", 1, "2018-03-09 19:04:05"),
            (6, 2125550199, "NY", 2, "2018-03-09 19:04:11"),
            (7, 7135550123, "TX", 3, "2018-03-09 19:04:30"),
        ]),
    ],
    "apartment_rentals": [
        """CREATE TABLE Apartments (apt_id INTEGER PRIMARY KEY, apt_type_code TEXT,
               bedroom_count INTEGER, room_count INTEGER)""",
        """CREATE TABLE Guests (guest_id INTEGER PRIMARY KEY, guest_first_name TEXT,
               gender_code TEXT)""",
        """CREATE TABLE Apartment_Bookings (apt_booking_id INTEGER PRIMARY KEY,
               apt_id INTEGER, guest_id INTEGER, booking_status_code TEXT,
               booking_start_date TEXT)""",
        ("Apartments", [
            (1, "Studio", 1, 3), (2, "Flat", 2, 5), (3, "Duplex", 3, 7),
            (4, "Flat", 2, 4), (5, "Studio", 1, 2), (6, "Flat", 4, 9),
        ]),
        ("Guests", [
            (1, "Kip", "Male"), (2, "Rebeca", "Female"), (3, "Keon", "Male"),
            (4, "Gabe", "Male"), (5, "Lou", "Female"),
        ]),
        ("Apartment_Bookings", [
            (258, 1, 2, "Provisional", "2016-09-26"),
            (279, 2, 1, "Provisional", "2016-04-01"),
            (337, 3, 3, "Confirmed", "2017-03-13"),
            (343, 4, 2, "Provisional", "2016-08-04"),
            (365, 5, 4, "Confirmed", "2017-07-03"),
            (401, 6, 5, "Provisional", "2017-02-19"),
            (497, 2, 3, "Confirmed", "2016-09-05"),
        ]),
    ],
    "wta_1": [
        """CREATE TABLE players (player_id INTEGER PRIMARY KEY, first_name TEXT,
               last_name TEXT, hand TEXT, country_code TEXT)""",
        """CREATE TABLE matches (match_id INTEGER PRIMARY KEY, tourney_name TEXT,
               year INTEGER, winner_id INTEGER, loser_id INTEGER, winner_hand TEXT,
               loser_hand TEXT, minutes INTEGER)""",
        ("players", [
            (200001, "Martina", "Hingis", "R", "SUI"),
            (200002, "Monica", "Seles", "L", "USA"),
            (200003, "Petra", "Kvitova", "L", "CZE"),
            (200004, "Angelique", "Kerber", "L", "GER"),
            (200005, "Serena", "Williams", "R", "USA"),
            (200006, "Simona", "Halep", "R", "ROU"),
        ]),
        ("matches", [
            (1, "WTA Championships", 2013, 200005, 200006, "R", "R", 95),
            (2, "WTA Championships", 2013, 200003, 200004, "L", "L", 120),
            (3, "WTA Championships", 2013, 200004, 200005, "L", "R", 101),
            (4, "Australian Open", 2016, 200004, 200005, "L", "R", 128),
            (5, "WTA Championships", 2016, 200004, 200003, "L", "L", 88),
            (6, "Wimbledon", 2014, 200003, 200001, "L", "R", 55),
            (7, "WTA Championships", 2014, 200002, 200006, "L", "R", 77),
        ]),
    ],
}


def build(root: str) -> None:
    for name, parts in DATABASES.items():
        folder = os.path.join(root, name)
        os.makedirs(folder, exist_ok=True)
        path = os.path.join(folder, name + ".sqlite")
        if os.path.exists(path):
            os.remove(path)
        conn = sqlite3.connect(path)
        for part in parts:
            if isinstance(part, str):
                conn.execute(part)
            else:
                table, rows = part
                marks = ",".join("?" * len(rows[0]))
                conn.executemany(f"INSERT INTO {table} VALUES ({marks})", rows)
        conn.commit()
        conn.execute("VACUUM")
        conn.close()
        print(path)


if __name__ == "__main__":
    build(sys.argv[1] if len(sys.argv) > 1 else "data/corpora/spider_fixture/database")
