def rain():
    total = 0
    count = 0
    while True:
        line = input("Give rainfall (-999 stops): ")
        if line == "-999":
            break
        value = float(line)
        if value < 0:
            continue
        total += value
        count += 1
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
